import type { EChartsOption, SeriesOption } from 'echarts';

import { numeric, requireColumns, SchemaError, Table } from './csv.js';

export type FigureKind = 'hit_vs_radius' | 'hit_vs_density' | 'hit_vs_cache' | 'aic_trace';

export const FIGURE_KINDS: FigureKind[] = [
  'hit_vs_radius',
  'hit_vs_density',
  'hit_vs_cache',
  'aic_trace',
];

const HITS_COLUMNS = [
  'R',
  'lambda_s',
  'M',
  'scheme',
  'analytic',
  'mc_estimate',
  'mc_halfwidth',
  'n_trials',
  'overlap_warning',
];

const TRACE_COLUMNS = ['cluster_count', 'k_i', 'log_likelihood', 'aic', 'aic_normalized'];

const HIT_X: Record<Exclude<FigureKind, 'aic_trace'>, { column: string; label: string }> = {
  hit_vs_radius: { column: 'R', label: 'serving radius R (km)' },
  hit_vs_density: { column: 'lambda_s', label: 'SBS density (per km²)' },
  hit_vs_cache: { column: 'M', label: 'cache size M (files)' },
};

interface HitPoint {
  x: number;
  analytic: number;
  estimate: number;
  halfwidth: number;
}

/** Vertical I-beam at (x, lo..hi), colored like its scheme. */
function errorBarSeries(name: string, data: number[][], color: string): SeriesOption {
  return {
    type: 'custom',
    name,
    data,
    silent: true,
    z: 10,
    color,
    renderItem: (_params: unknown, api: any) => {
      const [x, yLo] = api.coord([api.value(0), api.value(1)]);
      const yHi = api.coord([api.value(0), api.value(2)])[1];
      const style = { stroke: color, fill: 'none', lineWidth: 1.2 };
      const cap = 4;
      return {
        type: 'group',
        children: [
          { type: 'line', shape: { x1: x, y1: yLo, x2: x, y2: yHi }, style },
          { type: 'line', shape: { x1: x - cap, y1: yLo, x2: x + cap, y2: yLo }, style },
          { type: 'line', shape: { x1: x - cap, y1: yHi, x2: x + cap, y2: yHi }, style },
        ],
      };
    },
  };
}

const SCHEME_COLORS: Record<string, string> = {
  clustered: '#2f6fd6',
  baseline: '#d65a2f',
};

function buildHitChart(kind: Exclude<FigureKind, 'aic_trace'>, table: Table, path: string): EChartsOption {
  const idx = requireColumns(table, HITS_COLUMNS, path);
  const { column, label } = HIT_X[kind];
  const byScheme = new Map<string, HitPoint[]>();
  table.rows.forEach((row, i) => {
    const scheme = row[idx.get('scheme')!].trim();
    const point: HitPoint = {
      x: numeric(row[idx.get(column)!], column, i + 2),
      analytic: numeric(row[idx.get('analytic')!], 'analytic', i + 2),
      estimate: numeric(row[idx.get('mc_estimate')!], 'mc_estimate', i + 2),
      halfwidth: numeric(row[idx.get('mc_halfwidth')!], 'mc_halfwidth', i + 2),
    };
    (byScheme.get(scheme) ?? byScheme.set(scheme, []).get(scheme)!).push(point);
  });

  const series: SeriesOption[] = [];
  let fallback = 0;
  for (const [scheme, points] of byScheme) {
    points.sort((a, b) => a.x - b.x);
    const color = SCHEME_COLORS[scheme] ?? ['#3f9c6b', '#8d5fd3'][fallback++ % 2];
    series.push({
      type: 'line',
      name: `${scheme} (analytic)`,
      data: points.map((p) => [p.x, p.analytic]),
      color,
      symbol: 'none',
      lineStyle: { width: 2 },
    });
    series.push({
      type: 'scatter',
      name: `${scheme} (simulated)`,
      data: points.map((p) => [p.x, p.estimate]),
      color,
      symbolSize: 7,
    });
    series.push(
      errorBarSeries(
        `${scheme} 95% interval`,
        points.map((p) => [p.x, p.estimate - p.halfwidth, p.estimate + p.halfwidth]),
        color,
      ),
    );
  }

  return {
    animation: false,
    title: { text: 'Cache hit probability', left: 'center' },
    legend: { bottom: 0 },
    grid: { left: 70, right: 30, top: 50, bottom: 60 },
    xAxis: { type: 'value', name: label, nameLocation: 'middle', nameGap: 28 },
    yAxis: {
      type: 'value',
      name: 'hit probability',
      nameLocation: 'middle',
      nameGap: 45,
      min: 0,
      max: 1,
    },
    series,
  };
}

function buildTraceChart(table: Table, path: string): EChartsOption {
  const idx = requireColumns(table, TRACE_COLUMNS, path);
  const points = table.rows
    .map((row, i) => [
      numeric(row[idx.get('cluster_count')!], 'cluster_count', i + 2),
      numeric(row[idx.get('aic_normalized')!], 'aic_normalized', i + 2),
    ])
    .sort((a, b) => a[0] - b[0]);
  const best = points.reduce((lo, p) => (p[1] < lo[1] ? p : lo), points[0]);

  return {
    animation: false,
    title: { text: 'Model-selection criterion (normalized)', left: 'center' },
    grid: { left: 85, right: 30, top: 50, bottom: 60 },
    xAxis: { type: 'value', name: 'cluster count', nameLocation: 'middle', nameGap: 28 },
    yAxis: {
      type: 'value',
      name: 'criterion / users',
      nameLocation: 'middle',
      nameGap: 60,
      scale: true,
    },
    series: [
      {
        type: 'line',
        name: 'normalized criterion',
        data: points,
        color: '#2f6fd6',
        symbolSize: 6,
        markPoint: {
          symbol: 'pin',
          symbolSize: 42,
          itemStyle: { color: '#d65a2f' },
          label: { formatter: 'min', fontSize: 10 },
          data: [{ coord: best, name: 'minimum' }],
        },
      },
    ],
  };
}

export function buildChart(kind: FigureKind, table: Table, path: string): EChartsOption {
  if (kind === 'aic_trace') {
    return buildTraceChart(table, path);
  }
  if (kind in HIT_X) {
    return buildHitChart(kind, table, path);
  }
  throw new SchemaError(`unknown figure kind '${kind}'`);
}

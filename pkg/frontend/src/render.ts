import * as echarts from 'echarts';
import type { EChartsOption } from 'echarts';

/** Render a chart option to an SVG string, off-screen. */
export function renderSvg(option: EChartsOption, width = 860, height = 560): string {
  const chart = echarts.init(null, null, { renderer: 'svg', ssr: true, width, height });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

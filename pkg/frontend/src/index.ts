export { median, quantile } from "./stats";
export { parseExponentsCsv, parseL2Csv, SchemaError } from "./schema";
export type { ExponentRow, L2Row } from "./schema";
export {
  EXPONENT_CURVE_ORDER,
  exponentChartOption,
  l2ChartOption,
  l2Curves,
  renderSvg,
} from "./charts";
export { render, run } from "./cli";
export type { PlotSpec } from "./cli";

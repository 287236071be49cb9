export { CsvTable, column, parseCsv, readCsv, requireSchema } from "./csv.js";
export { LineFit, leastSquares, tailSlope } from "./fit.js";
export {
  EnergyGrowthSummary,
  FigureKind,
  RidgeSummary,
  SCHEMAS,
  WindowScanSummary,
  detectRidges,
  renderDensityMap,
  renderEnergyGrowth,
  renderPeakProfile,
  renderWindowScan,
} from "./plots.js";
export { runCli } from "./cli.js";

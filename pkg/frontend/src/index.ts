export {
  SchemaError,
  readTable,
  column,
  PHASE_COLUMNS,
  SCAN_COLUMNS,
  TRAJECTORY_COLUMNS,
} from "./csv.js";
export type { Table } from "./csv.js";
export { renderHeatmap } from "./heatmap.js";
export type { HeatmapOptions, RenderResult } from "./heatmap.js";
export { renderScan } from "./scan.js";
export type { ScanOptions } from "./scan.js";
export { renderTrajectory } from "./trajectory.js";
export type { TrajectoryOptions } from "./trajectory.js";
export { svgToPng, RasterError } from "./raster.js";

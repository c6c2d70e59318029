export { boxStats, quantile, BoxStats } from "./stats";
export { readCsvTable, CsvTable } from "./csv";
export {
  buildFigure,
  Figure,
  FigureKind,
  FIGURE_KINDS,
  GroupStats,
} from "./figures";
export { renderBoxplot, BoxplotOptions } from "./svg";

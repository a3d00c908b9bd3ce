export {
  convert,
  ConversionError,
  UnsupportedLayout,
  type ConversionManifest,
  type ConvertOptions,
  type DbId,
  type LabelsMode,
  type OutputInfo,
  type SourceInfo,
  type SubjectInfo,
  type VariableInfo,
} from './convert.js';
export { matGet, MatFormatError, parseMat, type MatFile, type MatVariable } from './mat.js';
export { DB3_SUBJECTS, type AmputeeInfo } from './dash.js';

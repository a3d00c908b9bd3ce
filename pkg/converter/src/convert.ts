/**
 * One-shot conversion from MAT-file EMG releases to the dlpr ingestion
 * format: one CSV (`ch1..chC,label,repetition`) plus one `key=value`
 * sidecar per recording, and a manifest with a checksum for every output.
 *
 * The converter never resamples or filters; labels are preserved verbatim
 * from the recording's stimulus fields.
 */

import { createHash } from 'node:crypto';
import * as fs from 'node:fs';
import * as path from 'node:path';

import { DB3_SUBJECTS } from './dash.js';
import { MatVariable, parseMat } from './mat.js';

export type DbId = 'db1' | 'db2' | 'db3' | 'db4' | 'db5';
export type LabelsMode = 'auto' | 'stimulus' | 'restimulus';

/** A named field the source file was expected to carry but does not. */
export class UnsupportedLayout extends Error {}

/** Anything else that stops a conversion: empty source dir, mixed rates… */
export class ConversionError extends Error {}

const DB_IDS: ReadonlySet<string> = new Set(['db1', 'db2', 'db3', 'db4', 'db5']);

// Documented acquisition rates of the releases whose rate is fixed; db4/db5
// archives vary, so their rate must come from the file or --rate.
const DB_DEFAULT_RATE: Partial<Record<DbId, number>> = {
  db1: 100,
  db2: 2000,
  db3: 2000,
};

export interface ConvertOptions {
  labels?: LabelsMode;
  /** Overrides both the in-file rate variable and the db default. */
  rate?: number;
}

export interface VariableInfo {
  name: string;
  rows: number;
  cols: number;
  storage: string;
}

export interface SourceInfo {
  file: string;
  sha256: string;
  subject: string;
  samples: number;
  labelsField: 'stimulus' | 'restimulus';
  variables: VariableInfo[];
  skipped: { name: string; kind: string }[];
}

export interface OutputInfo {
  file: string;
  sha256: string;
}

export interface SubjectInfo {
  id: string;
  amputee: boolean;
  dashScore?: number;
  remainingForearmPct?: number;
  phantomIntensity?: number;
}

export interface ConversionManifest {
  db: DbId;
  labelsMode: LabelsMode;
  channels: number;
  samplingRate: number;
  rateSource: 'rate-option' | 'frequency-variable' | 'db-default';
  subjects: SubjectInfo[];
  sources: SourceInfo[];
  outputs: OutputInfo[];
}

function sha256(bytes: Uint8Array | string): string {
  return createHash('sha256').update(bytes).digest('hex');
}

function columnAsInts(v: MatVariable, field: string): Int32Array {
  if (v.cols !== 1 && v.rows !== 1) {
    throw new UnsupportedLayout(`${field} must be a vector, got ${v.rows}x${v.cols}`);
  }
  const out = new Int32Array(v.data.length);
  for (let i = 0; i < v.data.length; i++) {
    const x = v.data[i]!;
    if (!Number.isFinite(x) || Math.trunc(x) !== x) {
      throw new UnsupportedLayout(`${field} contains non-integer value ${x} at index ${i}`);
    }
    out[i] = x;
  }
  return out;
}

interface ParsedRecording {
  emg: MatVariable;
  labels: Int32Array;
  labelsField: 'stimulus' | 'restimulus';
  repetitions: Int32Array;
  subjectNumber: number | null;
  fileRate: number | null;
  variables: VariableInfo[];
  skipped: { name: string; kind: string }[];
}

function scalarOf(v: MatVariable | undefined): number | null {
  if (v === undefined || v.data.length !== 1) return null;
  return v.data[0]!;
}

function parseRecording(bytes: Uint8Array, fileName: string, mode: LabelsMode): ParsedRecording {
  const mat = parseMat(bytes);
  const vars = mat.variables;

  const emg = vars.get('emg');
  if (emg === undefined) {
    throw new UnsupportedLayout(`${fileName}: no 'emg' variable`);
  }

  let labelsField: 'stimulus' | 'restimulus';
  if (mode === 'auto') {
    labelsField = vars.has('restimulus') ? 'restimulus' : 'stimulus';
  } else {
    labelsField = mode;
  }
  const labelsVar = vars.get(labelsField);
  if (labelsVar === undefined) {
    throw new UnsupportedLayout(`${fileName}: no '${labelsField}' variable`);
  }
  const labels = columnAsInts(labelsVar, labelsField);
  if (labels.length !== emg.rows) {
    throw new UnsupportedLayout(
      `${fileName}: ${labelsField} has ${labels.length} samples, emg has ${emg.rows}`,
    );
  }

  // The refined label stream pairs with the refined repetition counter.
  const repCandidates =
    labelsField === 'restimulus' ? ['rerepetition', 'repetition'] : ['repetition'];
  let repetitions: Int32Array | null = null;
  for (const name of repCandidates) {
    const v = vars.get(name);
    if (v !== undefined && v.data.length === emg.rows) {
      repetitions = columnAsInts(v, name);
      break;
    }
  }
  if (repetitions === null) {
    repetitions = new Int32Array(emg.rows);
  }

  const subjectNumber = scalarOf(vars.get('subject'));
  const fileRate = scalarOf(vars.get('frequency'));

  const variables: VariableInfo[] = [...vars.values()]
    .map((v) => ({ name: v.name, rows: v.rows, cols: v.cols, storage: v.storage }))
    .sort((a, b) => a.name.localeCompare(b.name));

  return {
    emg,
    labels,
    labelsField,
    repetitions,
    subjectNumber,
    fileRate,
    variables,
    skipped: mat.skipped,
  };
}

function subjectIdFor(rec: ParsedRecording, fileName: string): string {
  if (rec.subjectNumber !== null && Number.isInteger(rec.subjectNumber)) {
    return `s${rec.subjectNumber}`;
  }
  const m = /s(\d+)/i.exec(fileName);
  if (m !== null) return `s${parseInt(m[1]!, 10)}`;
  return path.basename(fileName, path.extname(fileName)).toLowerCase();
}

function subjectInfoFor(id: string, db: DbId): SubjectInfo {
  const info: SubjectInfo = { id, amputee: db === 'db3' };
  if (db === 'db3') {
    const m = /^s(\d+)$/.exec(id);
    const known = m === null ? undefined : DB3_SUBJECTS.get(parseInt(m[1]!, 10));
    if (known !== undefined) {
      info.dashScore = known.dashScore;
      info.remainingForearmPct = known.remainingForearmPct;
      info.phantomIntensity = known.phantomIntensity;
    }
  }
  return info;
}

function csvText(rec: ParsedRecording): string {
  const { emg, labels, repetitions } = rec;
  const header = [];
  for (let c = 1; c <= emg.cols; c++) header.push(`ch${c}`);
  header.push('label', 'repetition');

  const lines = [header.join(',')];
  for (let r = 0; r < emg.rows; r++) {
    const fields = new Array<string>(emg.cols + 2);
    for (let c = 0; c < emg.cols; c++) {
      // Shortest round-trip decimal: parsing it back yields the same float64.
      fields[c] = String(emg.data[c * emg.rows + r]!);
    }
    fields[emg.cols] = String(labels[r]!);
    fields[emg.cols + 1] = String(repetitions[r]!);
    lines.push(fields.join(','));
  }
  return lines.join('\n') + '\n';
}

function metaText(subject: SubjectInfo, rate: number): string {
  const lines = [
    `sampling_rate=${rate}`,
    `subject_id=${subject.id}`,
    `amputee=${subject.amputee ? 'true' : 'false'}`,
  ];
  if (subject.dashScore !== undefined) lines.push(`dash_score=${subject.dashScore}`);
  if (subject.remainingForearmPct !== undefined) {
    lines.push(`remaining_forearm_pct=${subject.remainingForearmPct}`);
  }
  if (subject.phantomIntensity !== undefined) {
    lines.push(`phantom_intensity=${subject.phantomIntensity}`);
  }
  return lines.join('\n') + '\n';
}

/**
 * Convert every .mat file under srcDir and write CSVs, sidecars, and
 * manifest.json into outDir. Deterministic: converting the same sources
 * twice produces identical checksums.
 */
export function convert(
  srcDir: string,
  db: string,
  outDir: string,
  options: ConvertOptions = {},
): ConversionManifest {
  if (!DB_IDS.has(db)) {
    throw new ConversionError(`unknown db id '${db}' (expected db1..db5)`);
  }
  const dbId = db as DbId;
  const mode = options.labels ?? 'auto';

  const matFiles = fs
    .readdirSync(srcDir)
    .filter((f) => f.toLowerCase().endsWith('.mat'))
    .sort();
  if (matFiles.length === 0) {
    throw new ConversionError(`${srcDir}: no .mat files found`);
  }

  fs.mkdirSync(outDir, { recursive: true });

  const sources: SourceInfo[] = [];
  const outputs: OutputInfo[] = [];
  const subjectsById = new Map<string, SubjectInfo>();
  const channelsBySubject = new Map<string, number>();
  let channels: number | null = null;
  let rate: number | null = options.rate ?? null;
  let rateSource: ConversionManifest['rateSource'] =
    options.rate !== undefined ? 'rate-option' : 'db-default';

  for (const fileName of matFiles) {
    const bytes = fs.readFileSync(path.join(srcDir, fileName));
    const rec = parseRecording(bytes, fileName, mode);

    const subjectId = subjectIdFor(rec, fileName);
    const subject = subjectsById.get(subjectId) ?? subjectInfoFor(subjectId, dbId);
    subjectsById.set(subjectId, subject);

    const prevChannels = channelsBySubject.get(subjectId);
    if (prevChannels !== undefined && prevChannels !== rec.emg.cols) {
      throw new ConversionError(
        `${fileName}: ${rec.emg.cols} channels, but ${subjectId} has files with ${prevChannels}`,
      );
    }
    channelsBySubject.set(subjectId, rec.emg.cols);
    if (channels === null) channels = rec.emg.cols;
    if (channels !== rec.emg.cols) {
      throw new ConversionError(
        `${fileName}: ${rec.emg.cols} channels, earlier files have ${channels}`,
      );
    }

    if (options.rate === undefined && rec.fileRate !== null) {
      if (rate !== null && rateSource === 'frequency-variable' && rate !== rec.fileRate) {
        throw new ConversionError(
          `${fileName}: rate variable says ${rec.fileRate} Hz, earlier files say ${rate}`,
        );
      }
      rate = rec.fileRate;
      rateSource = 'frequency-variable';
    }

    const stem = path.basename(fileName, path.extname(fileName)).toLowerCase();
    const csvName = `${stem}.csv`;
    const metaName = `${stem}.meta.txt`;
    const csv = csvText(rec);
    fs.writeFileSync(path.join(outDir, csvName), csv, 'utf-8');
    outputs.push({ file: csvName, sha256: sha256(csv) });

    sources.push({
      file: fileName,
      sha256: sha256(bytes),
      subject: subjectId,
      samples: rec.emg.rows,
      labelsField: rec.labelsField,
      variables: rec.variables,
      skipped: rec.skipped,
    });
  }

  if (rate === null) {
    const fallback = DB_DEFAULT_RATE[dbId];
    if (fallback === undefined) {
      throw new ConversionError(
        `${dbId} archives carry no fixed rate and the files name none; pass an explicit rate`,
      );
    }
    rate = fallback;
  }

  // Sidecars are written once the rate is settled (a later file's rate
  // variable may be the one that names it).
  for (const src of sources) {
    const stem = path.basename(src.file, path.extname(src.file)).toLowerCase();
    const meta = metaText(subjectsById.get(src.subject)!, rate);
    const metaName = `${stem}.meta.txt`;
    fs.writeFileSync(path.join(outDir, metaName), meta, 'utf-8');
    outputs.push({ file: metaName, sha256: sha256(meta) });
  }
  outputs.sort((a, b) => a.file.localeCompare(b.file));

  const manifest: ConversionManifest = {
    db: dbId,
    labelsMode: mode,
    channels: channels!,
    samplingRate: rate,
    rateSource,
    subjects: [...subjectsById.values()].sort((a, b) => a.id.localeCompare(b.id)),
    sources,
    outputs,
  };
  fs.writeFileSync(
    path.join(outDir, 'manifest.json'),
    JSON.stringify(manifest, null, 2) + '\n',
    'utf-8',
  );
  return manifest;
}

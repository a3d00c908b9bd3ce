/**
 * Minimal MAT v5 reader: enough to pull named 2-D numeric matrices out of
 * EMG recording releases. Handles the 128-byte header, zlib-compressed
 * elements, and the standard numeric storage types; cell/struct/sparse
 * variables are recorded by name and skipped.
 *
 * All matrices come back as column-major Float64Array regardless of the
 * on-disk storage type.
 */

import { inflateSync } from 'node:zlib';

// Element data types.
const MI_INT8 = 1;
const MI_UINT8 = 2;
const MI_INT16 = 3;
const MI_UINT16 = 4;
const MI_INT32 = 5;
const MI_UINT32 = 6;
const MI_SINGLE = 7;
const MI_DOUBLE = 9;
const MI_INT64 = 12;
const MI_UINT64 = 13;
const MI_MATRIX = 14;
const MI_COMPRESSED = 15;
const MI_UTF8 = 16;
const MI_UTF16 = 17;

// Array classes (first byte of the array-flags word).
const MX_CHAR = 4;
const MX_CLASS_NAMES: Record<number, string> = {
  1: 'cell',
  2: 'struct',
  3: 'object',
  4: 'char',
  5: 'sparse',
  6: 'double',
  7: 'single',
  8: 'int8',
  9: 'uint8',
  10: 'int16',
  11: 'uint16',
  12: 'int32',
  13: 'uint32',
  14: 'int64',
  15: 'uint64',
};
const NUMERIC_CLASSES = new Set([6, 7, 8, 9, 10, 11, 12, 13, 14, 15]);

export interface MatVariable {
  name: string;
  rows: number;
  cols: number;
  /** On-disk array class, e.g. "double" or "int16". */
  storage: string;
  /** Column-major values, upconverted to float64. */
  data: Float64Array;
}

export interface SkippedVariable {
  name: string;
  kind: string;
}

export interface MatFile {
  variables: Map<string, MatVariable>;
  skipped: SkippedVariable[];
}

export class MatFormatError extends Error {}

/** value at (row, col) of a column-major matrix. */
export function matGet(v: MatVariable, row: number, col: number): number {
  if (row < 0 || row >= v.rows || col < 0 || col >= v.cols) {
    throw new RangeError(`(${row}, ${col}) outside ${v.rows}x${v.cols} matrix ${v.name}`);
  }
  return v.data[col * v.rows + row]!;
}

interface Element {
  type: number;
  /** Payload bytes, exclusive of tag and padding. */
  data: Uint8Array;
}

class Cursor {
  pos = 0;
  readonly view: DataView;

  constructor(readonly bytes: Uint8Array, readonly littleEndian: boolean) {
    this.view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  }

  atEnd(): boolean {
    return this.pos >= this.bytes.length;
  }

  /** Read one tagged element and advance past its padding. */
  readElement(): Element {
    if (this.pos + 8 > this.bytes.length) {
      throw new MatFormatError(`truncated element tag at offset ${this.pos}`);
    }
    const word = this.view.getUint32(this.pos, this.littleEndian);
    if ((word & 0xffff0000) !== 0) {
      // Small element: size and type packed into the first word, payload
      // in the second — the whole element occupies exactly 8 bytes.
      const type = word & 0xffff;
      const nbytes = word >>> 16;
      if (nbytes > 4) {
        throw new MatFormatError(`small element at ${this.pos} claims ${nbytes} bytes`);
      }
      const data = this.bytes.subarray(this.pos + 4, this.pos + 4 + nbytes);
      this.pos += 8;
      return { type, data };
    }
    const type = word;
    const nbytes = this.view.getUint32(this.pos + 4, this.littleEndian);
    const start = this.pos + 8;
    if (start + nbytes > this.bytes.length) {
      throw new MatFormatError(
        `element at offset ${this.pos} claims ${nbytes} bytes, ` +
          `only ${this.bytes.length - start} remain`,
      );
    }
    const data = this.bytes.subarray(start, start + nbytes);
    this.pos = start + nbytes;
    // Elements are 8-byte aligned; compressed payloads are written unpadded.
    if (type !== MI_COMPRESSED) {
      this.pos += (8 - (this.pos % 8)) % 8;
    }
    return { type, data };
  }
}

function decodeNumeric(elem: Element, littleEndian: boolean): Float64Array {
  const { type, data } = elem;
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  const read = (width: number, get: (off: number) => number): Float64Array => {
    if (data.byteLength % width !== 0) {
      throw new MatFormatError(`numeric element length ${data.byteLength} not a multiple of ${width}`);
    }
    const n = data.byteLength / width;
    const out = new Float64Array(n);
    for (let i = 0; i < n; i++) out[i] = get(i * width);
    return out;
  };
  switch (type) {
    case MI_INT8:
      return read(1, (o) => view.getInt8(o));
    case MI_UINT8:
    case MI_UTF8:
      return read(1, (o) => view.getUint8(o));
    case MI_INT16:
      return read(2, (o) => view.getInt16(o, littleEndian));
    case MI_UINT16:
    case MI_UTF16:
      return read(2, (o) => view.getUint16(o, littleEndian));
    case MI_INT32:
      return read(4, (o) => view.getInt32(o, littleEndian));
    case MI_UINT32:
      return read(4, (o) => view.getUint32(o, littleEndian));
    case MI_SINGLE:
      return read(4, (o) => view.getFloat32(o, littleEndian));
    case MI_DOUBLE:
      return read(8, (o) => view.getFloat64(o, littleEndian));
    case MI_INT64:
      return read(8, (o) => Number(view.getBigInt64(o, littleEndian)));
    case MI_UINT64:
      return read(8, (o) => Number(view.getBigUint64(o, littleEndian)));
    default:
      throw new MatFormatError(`unsupported numeric element type ${type}`);
  }
}

function parseMatrix(elem: Element, littleEndian: boolean, file: MatFile): void {
  const cur = new Cursor(elem.data, littleEndian);

  const flagsElem = cur.readElement();
  if (flagsElem.type !== MI_UINT32 || flagsElem.data.byteLength !== 8) {
    throw new MatFormatError('matrix is missing its array-flags block');
  }
  const flagsView = new DataView(
    flagsElem.data.buffer,
    flagsElem.data.byteOffset,
    flagsElem.data.byteLength,
  );
  const flags = flagsView.getUint32(0, littleEndian);
  const arrayClass = flags & 0xff;
  const complex = (flags & 0x0800) !== 0;

  const dimsElem = cur.readElement();
  if (dimsElem.type !== MI_INT32) {
    throw new MatFormatError('matrix is missing its dimensions block');
  }
  const dims = Array.from(decodeNumeric(dimsElem, littleEndian), (d) => d | 0);

  const nameElem = cur.readElement();
  if (nameElem.type !== MI_INT8) {
    throw new MatFormatError('matrix is missing its name block');
  }
  const name = new TextDecoder('ascii').decode(nameElem.data);

  const className = MX_CLASS_NAMES[arrayClass] ?? `class ${arrayClass}`;
  if (!NUMERIC_CLASSES.has(arrayClass) && arrayClass !== MX_CHAR) {
    file.skipped.push({ name, kind: className });
    return;
  }
  if (dims.length !== 2) {
    file.skipped.push({ name, kind: `${className} with ${dims.length} dims` });
    return;
  }
  if (complex) {
    file.skipped.push({ name, kind: `complex ${className}` });
    return;
  }

  const [rows, cols] = dims as [number, number];
  const data = decodeNumeric(cur.readElement(), littleEndian);
  if (data.length !== rows * cols) {
    throw new MatFormatError(
      `${name}: ${rows}x${cols} dims but ${data.length} stored values`,
    );
  }
  file.variables.set(name, { name, rows, cols, storage: className, data });
}

/** Parse an entire MAT v5 file image. */
export function parseMat(bytes: Uint8Array): MatFile {
  if (bytes.length < 128) {
    throw new MatFormatError(`file is ${bytes.length} bytes, smaller than the 128-byte header`);
  }
  const e0 = bytes[126]!;
  const e1 = bytes[127]!;
  let littleEndian: boolean;
  if (e0 === 0x49 && e1 === 0x4d) {
    littleEndian = true; // "IM"
  } else if (e0 === 0x4d && e1 === 0x49) {
    littleEndian = false; // "MI"
  } else {
    throw new MatFormatError('bad endian indicator; not a MAT v5 file');
  }

  const file: MatFile = { variables: new Map(), skipped: [] };
  const cur = new Cursor(bytes.subarray(128), littleEndian);
  while (!cur.atEnd()) {
    const elem = cur.readElement();
    if (elem.type === MI_COMPRESSED) {
      let inflated: Uint8Array;
      try {
        inflated = inflateSync(elem.data);
      } catch (err) {
        throw new MatFormatError(`bad compressed element: ${err}`);
      }
      const inner = new Cursor(inflated, littleEndian);
      while (!inner.atEnd()) {
        const child = inner.readElement();
        if (child.type === MI_MATRIX) parseMatrix(child, littleEndian, file);
      }
    } else if (elem.type === MI_MATRIX) {
      parseMatrix(elem, littleEndian, file);
    }
    // Other top-level element types carry no variables; skip silently.
  }
  return file;
}

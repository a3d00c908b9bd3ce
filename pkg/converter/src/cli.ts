#!/usr/bin/env node
/**
 * Command-line entry: ninapro_convert --db db1 --src <dir> --out <dir>
 * [--labels stimulus|restimulus] [--rate <hz>]
 *
 * Exit codes: 0 success, 1 usage error, 2 conversion/layout error.
 */

import { realpathSync } from 'node:fs';
import { fileURLToPath } from 'node:url';

import { convert, ConversionError, LabelsMode, UnsupportedLayout } from './convert.js';

const USAGE =
  'usage: ninapro_convert --db <db1|db2|db3|db4|db5> --src <dir> --out <dir>\n' +
  '                       [--labels stimulus|restimulus] [--rate <hz>]';

interface Args {
  db: string;
  src: string;
  out: string;
  labels: LabelsMode;
  rate?: number;
}

class UsageError extends Error {}

function parseArgs(argv: string[]): Args {
  const values = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i]!;
    if (flag === '--help' || flag === '-h') throw new UsageError('');
    const value = argv[i + 1];
    if (!flag.startsWith('--') || value === undefined) {
      throw new UsageError(`bad argument '${flag}'`);
    }
    values.set(flag.slice(2), value);
  }

  const known = new Set(['db', 'src', 'out', 'labels', 'rate']);
  for (const key of values.keys()) {
    if (!known.has(key)) throw new UsageError(`unknown flag --${key}`);
  }
  for (const required of ['db', 'src', 'out']) {
    if (!values.has(required)) throw new UsageError(`--${required} is required`);
  }

  const labels = (values.get('labels') ?? 'auto') as LabelsMode;
  if (labels !== 'auto' && labels !== 'stimulus' && labels !== 'restimulus') {
    throw new UsageError(`--labels must be stimulus or restimulus, got '${labels}'`);
  }

  let rate: number | undefined;
  if (values.has('rate')) {
    rate = Number(values.get('rate'));
    if (!Number.isFinite(rate) || rate <= 0) {
      throw new UsageError(`--rate must be a positive number, got '${values.get('rate')}'`);
    }
  }

  return { db: values.get('db')!, src: values.get('src')!, out: values.get('out')!, labels, rate };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      if (err.message !== '') console.error(err.message);
      console.error(USAGE);
      return err.message === '' ? 0 : 1;
    }
    throw err;
  }

  try {
    const manifest = convert(args.src, args.db, args.out, {
      labels: args.labels,
      rate: args.rate,
    });
    console.log(
      `converted ${manifest.sources.length} file(s): ` +
        `${manifest.channels} channels at ${manifest.samplingRate} Hz -> ${args.out}`,
    );
    return 0;
  } catch (err) {
    if (err instanceof UnsupportedLayout || err instanceof ConversionError) {
      console.error(String(err.message));
      return 2;
    }
    if (err instanceof Error && 'code' in err) {
      console.error(String(err.message)); // fs errors: missing dir etc.
      return 2;
    }
    throw err;
  }
}

const invokedDirectly = (() => {
  if (process.argv[1] === undefined) return false;
  try {
    return realpathSync(process.argv[1]) === fileURLToPath(import.meta.url);
  } catch {
    return false;
  }
})();

if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}

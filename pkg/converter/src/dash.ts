/**
 * Bundled subject metadata for the transradial-amputee recordings release
 * (db3). The archives themselves carry no questionnaire data, so the
 * published per-subject values ship with the converter, keyed by subject
 * number.
 */

export interface AmputeeInfo {
  /** Disability questionnaire score, 0-100, higher = more disability. */
  dashScore: number;
  remainingForearmPct: number;
  /** Phantom-limb sensation intensity, 0-5. */
  phantomIntensity: number;
}

export const DB3_SUBJECTS: ReadonlyMap<number, AmputeeInfo> = new Map([
  [2, { dashScore: 15.18, remainingForearmPct: 70, phantomIntensity: 5 }],
  [4, { dashScore: 86.67, remainingForearmPct: 40, phantomIntensity: 1 }],
  [8, { dashScore: 33.33, remainingForearmPct: 50, phantomIntensity: 2 }],
  [9, { dashScore: 3.3, remainingForearmPct: 90, phantomIntensity: 5 }],
  [11, { dashScore: 12.5, remainingForearmPct: 90, phantomIntensity: 4 }],
]);

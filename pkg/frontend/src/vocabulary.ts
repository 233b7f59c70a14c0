/**
 * The closed dependency-tag vocabulary of the document wire format and
 * the argument categories a tag extension may map onto.  This mirrors
 * the consuming engine's contract; the bridge never emits a tag outside
 * this set (or the document's declared extensions).
 */

export const ARG_CATEGORIES = ['MOD', 'TIME', 'LOC', 'MANN', 'FN'] as const
export type ArgCategory = (typeof ARG_CATEGORIES)[number]

export const BASE_VOCABULARY: ReadonlySet<string> = new Set([
  // role tags
  'Agt',
  'Pat',
  'Root',
  // modifier tags
  'mDEPD',
  'mTime',
  'mRang',
  'mDegr',
  'mFreq',
  'mDir',
  'mNEG',
  'mMod',
  // time tags
  'Time',
  'Tini',
  'Tfin',
  'Tdur',
  'Trang',
  // location tags
  'Loc',
  'Lini',
  'Lfin',
  'Lthru',
  'Dir',
  // manner tags
  'Mann',
  'Tool',
  'Matl',
  'Accd',
  // footnote tags
  'LINK',
  'Clas',
])

export function isVocabularyTag(tag: string): boolean {
  return BASE_VOCABULARY.has(tag)
}

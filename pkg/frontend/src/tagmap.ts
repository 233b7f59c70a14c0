/**
 * Rename maps translate a backend's tag inventory into the wire-format
 * vocabulary.  Tags the map does not cover raise UnmappedTag listing
 * every offender, instead of silently guessing.
 */

import { readFileSync } from 'node:fs'

import type { SdpDocumentJson } from './document.js'
import { BadConfig, UnmappedTag } from './errors.js'
import { isVocabularyTag } from './vocabulary.js'

export type RenameMap = Record<string, string>

export function loadRenameMap(path: string): RenameMap {
  let parsed: unknown
  try {
    parsed = JSON.parse(readFileSync(path, 'utf-8'))
  } catch (error) {
    throw new BadConfig(`cannot read rename map ${path}: ${String(error)}`)
  }
  if (typeof parsed !== 'object' || parsed === null || Array.isArray(parsed)) {
    throw new BadConfig(`rename map ${path} must be a JSON object`)
  }
  const map = parsed as RenameMap
  checkCodomain(map)
  return map
}

/** The map's codomain must stay inside the wire-format vocabulary. */
export function checkCodomain(map: RenameMap, extensions: string[] = []): void {
  const bad = Object.entries(map).filter(
    ([, target]) => !isVocabularyTag(target) && !extensions.includes(target),
  )
  if (bad.length > 0) {
    throw new BadConfig(
      `rename map targets outside the vocabulary: ${bad
        .map(([source, target]) => `${source}->${target}`)
        .join(', ')}`,
    )
  }
}

/** Rename every tag in place-order; collect unknowns and fail loudly. */
export function applyRenameMap(
  doc: SdpDocumentJson,
  map: RenameMap,
): SdpDocumentJson {
  const unmapped = new Set<string>()
  const sentences = doc.sentences.map((sentence) => ({
    ...sentence,
    tokens: sentence.tokens.map((token) => ({
      ...token,
      deps: token.deps.map(([head, tag]): [number, string] => {
        if (isVocabularyTag(tag)) return [head, tag]
        const target = map[tag]
        if (target === undefined) {
          unmapped.add(tag)
          return [head, tag]
        }
        return [head, target]
      }),
    })),
  }))
  if (unmapped.size > 0) {
    throw new UnmappedTag([...unmapped].sort())
  }
  return { ...doc, sentences }
}

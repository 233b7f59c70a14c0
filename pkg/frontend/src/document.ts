/**
 * Wire-format types and the validator the bridge runs before writing
 * any output.  The rules mirror the consuming engine's ingestion checks:
 * contiguous 1-based token indices, heads pointing at real tokens (0 is
 * the virtual root), at least one dependency per token, vocabulary-only
 * tags (minus declared extensions), strictly increasing sentence indices
 * from 0, and an acyclic dependency graph per sentence.
 */

import { ARG_CATEGORIES, isVocabularyTag } from './vocabulary.js'

export type Dep = [head: number, tag: string]

export interface SdpTokenJson {
  i: number
  form: string
  deps: Dep[]
}

export interface SdpSentenceJson {
  index: number
  text: string
  tokens: SdpTokenJson[]
}

export interface SdpDocumentJson {
  manual_id: string
  space_delimited?: boolean
  tag_extensions?: Record<string, string>
  sentences: SdpSentenceJson[]
}

export function validateDocument(doc: SdpDocumentJson): string[] {
  const problems: string[] = []
  if (!doc.manual_id) {
    problems.push('manual_id must be a non-empty string')
  }
  const extensions = doc.tag_extensions ?? {}
  for (const [tag, category] of Object.entries(extensions)) {
    if (isVocabularyTag(tag)) {
      problems.push(`tag_extensions may not override base tag ${tag}`)
    }
    if (!(ARG_CATEGORIES as readonly string[]).includes(category)) {
      problems.push(`tag_extensions[${tag}] maps to unknown category ${category}`)
    }
  }
  const known = (tag: string) => isVocabularyTag(tag) || tag in extensions

  doc.sentences.forEach((sentence, position) => {
    const where = `sentence ${sentence.index}`
    if (sentence.index !== position) {
      problems.push(`${where}: index out of order, expected ${position}`)
    }
    sentence.tokens.forEach((token, at) => {
      if (token.i !== at + 1) {
        problems.push(`${where}: token index ${token.i} not contiguous`)
      }
      if (!token.form) {
        problems.push(`${where}: token ${token.i} has an empty form`)
      }
      if (!token.deps || token.deps.length === 0) {
        problems.push(`${where}: token ${token.i} has no dependencies`)
      }
      for (const [head, tag] of token.deps ?? []) {
        if (head < 0 || head > sentence.tokens.length) {
          problems.push(`${where}: token ${token.i} points at missing head ${head}`)
        }
        if (!known(tag)) {
          problems.push(`${where}: token ${token.i} uses unknown tag ${tag}`)
        }
      }
    })
    problems.push(...findCycles(sentence))
  })
  return problems
}

function findCycles(sentence: SdpSentenceJson): string[] {
  const colors = new Array<number>(sentence.tokens.length + 1).fill(0)
  const headsOf = (index: number): number[] =>
    (sentence.tokens[index - 1]?.deps ?? [])
      .map(([head]) => head)
      .filter((head) => head > 0 && head <= sentence.tokens.length)

  const visit = (index: number): boolean => {
    colors[index] = 1
    for (const head of headsOf(index)) {
      if (colors[head] === 1) return true
      if (colors[head] === 0 && visit(head)) return true
    }
    colors[index] = 2
    return false
  }

  for (const token of sentence.tokens) {
    if (colors[token.i] === 0 && visit(token.i)) {
      return [`sentence ${sentence.index}: dependency cycle detected`]
    }
  }
  return []
}

/** Canonical serialization: stable key order, one trailing newline. */
export function serializeDocument(doc: SdpDocumentJson): string {
  const ordered: Record<string, unknown> = { manual_id: doc.manual_id }
  if (doc.space_delimited === false) ordered.space_delimited = false
  if (doc.tag_extensions && Object.keys(doc.tag_extensions).length > 0) {
    ordered.tag_extensions = doc.tag_extensions
  }
  ordered.sentences = doc.sentences.map((sentence) => ({
    index: sentence.index,
    text: sentence.text,
    tokens: sentence.tokens.map((token) => ({
      i: token.i,
      form: token.form,
      deps: token.deps,
    })),
  }))
  return JSON.stringify(ordered) + '\n'
}

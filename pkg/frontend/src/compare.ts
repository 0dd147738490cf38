/**
 * Side-by-side response comparison for manual preference checks.
 *
 * Display only: responses from two backends are shown anonymized (stable
 * shuffle per comparison key) and the mapping is revealed only on demand.
 * No scores are computed or stored.
 */

export interface ComparisonSide {
  label: 'A' | 'B'
  content: string
}

export interface Comparison {
  left: ComparisonSide
  right: ComparisonSide
  /** which source ("first" | "second") is shown as A; hidden until reveal */
  mapping: { A: 'first' | 'second'; B: 'first' | 'second' }
}

function hashKey(key: string): number {
  let h = 2166136261
  for (const ch of key) {
    h ^= ch.codePointAt(0) ?? 0
    h = Math.imul(h, 16777619)
  }
  return h >>> 0
}

export function buildComparison(first: string, second: string, key: string): Comparison {
  const swap = hashKey(key) % 2 === 1
  const [aContent, bContent] = swap ? [second, first] : [first, second]
  return {
    left: { label: 'A', content: aContent },
    right: { label: 'B', content: bContent },
    mapping: swap ? { A: 'second', B: 'first' } : { A: 'first', B: 'second' },
  }
}

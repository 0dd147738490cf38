/** Response presentation helpers: emoji-bullet highlighting, card chips. */

const EMOJI_RANGES: [number, number][] = [
  [0x1f000, 0x1faff],
  [0x2600, 0x27bf],
  [0x2b00, 0x2bff],
  [0x1f900, 0x1f9ff],
]

export function startsWithEmoji(line: string): boolean {
  const first = [...line.trimStart()][0]
  if (!first) return false
  const code = first.codePointAt(0) ?? 0
  return EMOJI_RANGES.some(([lo, hi]) => code >= lo && code <= hi)
}

export interface HighlightedLine {
  text: string
  emojiBullet: boolean
}

export function highlightResponse(content: string): HighlightedLine[] {
  return content
    .split('\n')
    .map((line) => ({ text: line, emojiBullet: startsWithEmoji(line) }))
}

/** Titles that the mobile client would show as product cards. */
export function cardTitles(toolResult: unknown): string[] {
  const titles: string[] = []
  const walk = (value: unknown): void => {
    if (Array.isArray(value)) {
      value.forEach(walk)
    } else if (value !== null && typeof value === 'object') {
      const record = value as Record<string, unknown>
      if (typeof record.title === 'string') titles.push(record.title)
      Object.values(record).forEach(walk)
    }
  }
  walk(toolResult)
  return titles
}

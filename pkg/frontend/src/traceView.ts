/**
 * Trace inspection view model and HTML rendering.
 *
 * Rendering is lossless: every field of the trace JSON ends up in the view,
 * both as structured panels and as a verbatim details block per visit. The
 * view never mutates trace data.
 */
import type { TraceDoc, VisitDoc } from './types.js'

export interface VisitView {
  node: string
  kind: 'llm' | 'tool' | 'final'
  retries: number
  badges: string[]
  summary: string
  /** the untouched visit document, rendered verbatim in the details panel */
  source: VisitDoc
}

export interface TraceView {
  turnIndex: number
  path: string[]
  visits: VisitView[]
}

function visitKind(visit: VisitDoc): 'llm' | 'tool' | 'final' {
  const kind = visit.parsed_output?.type
  if (kind === 'tool_execution') return 'tool'
  if (visit.parsed_output === null && visit.prompt_snapshot === null) return 'final'
  return 'llm'
}

function summarize(visit: VisitDoc): string {
  const parsed = visit.parsed_output
  if (!parsed) return 'traversal end'
  if (parsed.type === 'tool_call') {
    return `tool call ${String(parsed.name)}(${JSON.stringify(parsed.arguments)})`
  }
  if (parsed.type === 'tool_execution') {
    const call = parsed.tool_call as { name: string } | undefined
    return `executed ${call?.name ?? '?'}`
  }
  return `replied: ${String(parsed.content ?? '').slice(0, 80)}`
}

export function buildTraceView(trace: TraceDoc): TraceView {
  return {
    turnIndex: trace.turn_index,
    path: trace.visits.map((v) => v.node),
    visits: trace.visits.map((visit) => {
      const badges: string[] = []
      if (visit.retries_used > 0) badges.push(`retries: ${visit.retries_used}`)
      if (visit.prompt_snapshot?.constrained) badges.push('constrained')
      if (visit.parsed_output?.fallback) badges.push('fallback')
      return {
        node: visit.node,
        kind: visitKind(visit),
        retries: visit.retries_used,
        badges,
        summary: summarize(visit),
        source: visit,
      }
    }),
  }
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;')
}

export function renderTraceHtml(view: TraceView): string {
  const parts: string[] = [
    `<div class="trace" data-turn="${view.turnIndex}">`,
    `<div class="trace-path">${view.path.map(escapeHtml).join(' &rarr; ')}</div>`,
  ]
  for (const visit of view.visits) {
    parts.push(`<section class="visit visit-${visit.kind}">`)
    parts.push(`<h3>${escapeHtml(visit.node)}</h3>`)
    for (const badge of visit.badges) {
      parts.push(`<span class="badge">${escapeHtml(badge)}</span>`)
    }
    parts.push(`<p class="summary">${escapeHtml(visit.summary)}</p>`)
    if (visit.source.prompt_snapshot) {
      parts.push(
        `<details class="prompt"><summary>prompt</summary><pre>${escapeHtml(
          JSON.stringify(visit.source.prompt_snapshot, null, 2),
        )}</pre></details>`,
      )
    }
    if (visit.source.raw_backend_output !== null) {
      parts.push(`<pre class="raw">${escapeHtml(visit.source.raw_backend_output)}</pre>`)
    }
    // Verbatim visit document so nothing the service recorded is hidden.
    parts.push(
      `<details class="visit-json"><summary>full record</summary><pre>${escapeHtml(
        JSON.stringify(visit.source, null, 2),
      )}</pre></details>`,
    )
    parts.push('</section>')
  }
  parts.push('</div>')
  return parts.join('\n')
}

/** All leaf paths of a JSON document, as JSON-pointer-ish strings. */
export function leafPaths(value: unknown, prefix = ''): [string, unknown][] {
  if (Array.isArray(value)) {
    return value.flatMap((item, i) => leafPaths(item, `${prefix}/${i}`))
  }
  if (value !== null && typeof value === 'object') {
    return Object.entries(value as Record<string, unknown>).flatMap(([key, item]) =>
      leafPaths(item, `${prefix}/${key}`),
    )
  }
  return [[prefix, value]]
}

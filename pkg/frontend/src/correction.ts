/**
 * Correction editor state: parse the annotator's JSON, validate against the
 * tool's input schema, and gate submission. The server re-validates; client
 * checks exist to surface problems before the round trip.
 */
import { ServiceClient, ServiceError } from './api.js'
import { validateValue } from './schema.js'
import type { SchemaDoc, Violation } from './types.js'

export interface EditorState {
  argsText: string
  parsed: unknown
  parseError: string | null
  violations: Violation[]
  canSubmit: boolean
}

export function evaluateEditor(schema: SchemaDoc, argsText: string): EditorState {
  let parsed: unknown = undefined
  let parseError: string | null = null
  try {
    parsed = JSON.parse(argsText)
  } catch (err) {
    parseError = `not valid JSON: ${(err as Error).message}`
  }
  const violations = parseError === null ? validateValue(schema, parsed) : []
  return {
    argsText,
    parsed,
    parseError,
    violations,
    canSubmit: parseError === null && violations.length === 0,
  }
}

export interface SubmitOutcome {
  ok: boolean
  /** violations reported by the server (authoritative) */
  serverViolations: Violation[]
  errorCode?: string
}

export async function submitArgumentCorrection(
  client: ServiceClient,
  conversationId: string,
  turnIndex: number,
  state: EditorState,
  annotatorNote = '',
  reexecute = false,
): Promise<SubmitOutcome> {
  if (!state.canSubmit) {
    throw new Error('editor state does not allow submission')
  }
  try {
    await client.submitCorrection(conversationId, {
      turn_index: turnIndex,
      target: 'tool_call_arguments',
      replacement: state.parsed,
      annotator_note: annotatorNote,
      reexecute,
    })
    return { ok: true, serverViolations: [] }
  } catch (err) {
    if (err instanceof ServiceError) {
      return { ok: false, serverViolations: err.violations, errorCode: err.code }
    }
    throw err
  }
}

export async function submitResponseCorrection(
  client: ServiceClient,
  conversationId: string,
  turnIndex: number,
  replacement: string,
  annotatorNote = '',
): Promise<SubmitOutcome> {
  try {
    await client.submitCorrection(conversationId, {
      turn_index: turnIndex,
      target: 'response_text',
      replacement,
      annotator_note: annotatorNote,
    })
    return { ok: true, serverViolations: [] }
  } catch (err) {
    if (err instanceof ServiceError) {
      return { ok: false, serverViolations: err.violations, errorCode: err.code }
    }
    throw err
  }
}

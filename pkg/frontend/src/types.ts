/** Wire types mirroring the service's JSON bodies. */

export interface MessageDoc {
  role: string
  content: string
  origin_node?: string
  tool_call?: { name: string; arguments: unknown }
  tool_result?: unknown
}

export interface VisitDoc {
  node: string
  prompt_snapshot: {
    system_prompt: string
    messages: MessageDoc[]
    constrained: boolean
    temperature: number
  } | null
  raw_backend_output: string | null
  parsed_output: Record<string, unknown> | null
  retries_used: number
}

export interface TraceDoc {
  turn_index: number
  visits: VisitDoc[]
}

export interface TurnDoc {
  turn_index: number
  user_message: MessageDoc
  response: MessageDoc
  corrected_response: string
  tool_call: { name: string; arguments: unknown } | null
  trace: TraceDoc
}

export interface ConversationDoc {
  id: string
  status: string
  turns: TurnDoc[]
  corrections: CorrectionDoc[]
}

export interface CorrectionDoc {
  turn_index: number
  target: string
  replacement: unknown
  annotator_note: string
  reexecuted_result?: unknown
}

export interface SendResult {
  response: MessageDoc
  trace_id: string
  turn_index: number
}

/** JSON-schema subset documents, exactly as the service declares them. */
export interface SchemaDoc {
  type?: string
  enum?: unknown[]
  properties?: Record<string, SchemaDoc>
  required?: string[]
  items?: SchemaDoc
  minimum?: number
  maximum?: number
  min_length?: number
  max_length?: number
}

export interface Violation {
  path: string
  reason: string
}

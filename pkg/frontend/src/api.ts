/** Thin typed client over the service HTTP API. */
import type { ConversationDoc, SendResult, TraceDoc, Violation } from './types.js'

export class ServiceError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public violations: Violation[] = [],
  ) {
    super(message)
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>

export class ServiceClient {
  constructor(
    private baseUrl: string,
    private token: string,
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const init: RequestInit = {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body !== undefined ? { 'Content-Type': 'application/json' } : {}),
      },
      ...(body !== undefined ? { body: JSON.stringify(body) } : {}),
    }
    let response: Response
    try {
      response = await this.fetchImpl(this.baseUrl + path, init)
    } catch (err) {
      throw new ServiceError(0, 'backend_unavailable', String(err))
    }
    const payload = await response.json().catch(() => ({}))
    if (!response.ok) {
      const error = (payload as { error?: { code?: string; message?: string; violations?: Violation[] } }).error
      throw new ServiceError(
        response.status,
        error?.code ?? 'unknown_error',
        error?.message ?? `HTTP ${response.status}`,
        error?.violations ?? [],
      )
    }
    return payload
  }

  async health(): Promise<boolean> {
    const body = (await this.request('GET', '/healthz')) as { status?: string }
    return body.status === 'ok'
  }

  async createSession(): Promise<string> {
    const body = (await this.request('POST', '/sessions', {})) as { session_id: string }
    return body.session_id
  }

  async sendMessage(sessionId: string, content: string): Promise<SendResult> {
    return (await this.request('POST', `/sessions/${sessionId}/messages`, {
      content,
    })) as SendResult
  }

  async getTrace(sessionId: string, turnIndex: number): Promise<TraceDoc> {
    return (await this.request('GET', `/sessions/${sessionId}/trace/${turnIndex}`)) as TraceDoc
  }

  async getConversation(conversationId: string): Promise<ConversationDoc> {
    return (await this.request('GET', `/conversations/${conversationId}`)) as ConversationDoc
  }

  async listConversations(status?: string): Promise<{ id: string; status: string; turns: number }[]> {
    const query = status ? `?status=${encodeURIComponent(status)}` : ''
    const body = (await this.request('GET', `/conversations${query}`)) as {
      conversations: { id: string; status: string; turns: number }[]
    }
    return body.conversations
  }

  async submitCorrection(
    conversationId: string,
    correction: {
      turn_index: number
      target: string
      replacement: unknown
      annotator_note?: string
      reexecute?: boolean
    },
  ): Promise<{ id: string; status: string; corrections: number }> {
    return (await this.request(
      'POST',
      `/conversations/${conversationId}/corrections`,
      correction,
    )) as { id: string; status: string; corrections: number }
  }

  async setStatus(conversationId: string, status: string): Promise<string> {
    const body = (await this.request('POST', `/conversations/${conversationId}/status`, {
      status,
    })) as { status: string }
    return body.status
  }
}

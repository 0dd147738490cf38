/**
 * Chat panel state machine: one active session, serialized sends with a
 * queued indicator, error banners carrying the service's error codes.
 */
import { ServiceClient, ServiceError } from './api.js'
import type { MessageDoc } from './types.js'

export interface ChatEntry {
  role: 'user' | 'assistant'
  content: string
  originNode?: string
  turnIndex?: number
}

export interface ChatState {
  sessionId: string | null
  entries: ChatEntry[]
  sending: boolean
  queued: number
  errorBanner: string | null
}

export class ChatPanel {
  state: ChatState = { sessionId: null, entries: [], sending: false, queued: 0, errorBanner: null }
  private listeners: (() => void)[] = []
  private chain: Promise<void> = Promise.resolve()
  private pending = 0

  constructor(private client: ServiceClient) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener)
  }

  private emit(): void {
    this.listeners.forEach((fn) => fn())
  }

  private syncFlags(): void {
    this.state.sending = this.pending > 0
    this.state.queued = Math.max(0, this.pending - 1)
  }

  async start(): Promise<string> {
    const sessionId = await this.client.createSession()
    this.state.sessionId = sessionId
    this.emit()
    return sessionId
  }

  /** Queue a message; resolves with the assistant reply's turn index. */
  send(content: string): Promise<number | null> {
    this.pending += 1
    this.syncFlags()
    this.emit()
    const task = this.chain.then(() => this.deliver(content))
    this.chain = task.then(
      () => undefined,
      () => undefined,
    )
    return task
  }

  private async deliver(content: string): Promise<number | null> {
    if (!this.state.sessionId) throw new Error('no active session')
    this.state.errorBanner = null
    this.state.entries.push({ role: 'user', content })
    this.emit()
    try {
      const result = await this.client.sendMessage(this.state.sessionId, content)
      this.state.entries.push({
        role: 'assistant',
        content: renderContent(result.response),
        originNode: result.response.origin_node,
        turnIndex: result.turn_index,
      })
      return result.turn_index
    } catch (err) {
      if (err instanceof ServiceError) {
        this.state.errorBanner = `${err.code}: ${err.message}`
        return null
      }
      throw err
    } finally {
      this.pending -= 1
      this.syncFlags()
      this.emit()
    }
  }
}

function renderContent(message: MessageDoc): string {
  if (message.tool_call) {
    return `[tool call] ${message.tool_call.name} ${JSON.stringify(message.tool_call.arguments)}`
  }
  return message.content
}

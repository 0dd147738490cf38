/**
 * Console wiring: three panes (chat / trace / corrections) over the tested
 * view models. This file is intentionally thin DOM glue.
 */
import { ServiceClient, ServiceError } from './api.js'
import { ChatPanel } from './chat.js'
import { evaluateEditor, submitArgumentCorrection } from './correction.js'
import { highlightResponse } from './format.js'
import { buildTraceView, escapeHtml, renderTraceHtml } from './traceView.js'
import type { SchemaDoc } from './types.js'

declare global {
  interface Window {
    FLOWAGENT_SCHEMAS?: Record<string, SchemaDoc>
  }
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node as T
}

function renderChat(panel: ChatPanel): void {
  const log = el<HTMLDivElement>('chat-log')
  log.innerHTML = panel.state.entries
    .map((entry) => {
      const lines = highlightResponse(entry.content)
        .map(
          (line) =>
            `<span class="line${line.emojiBullet ? ' emoji-bullet' : ''}">${escapeHtml(line.text)}</span>`,
        )
        .join('<br>')
      const trace =
        entry.turnIndex !== undefined
          ? ` <a href="#" class="view-trace" data-turn="${entry.turnIndex}">view trace</a>`
          : ''
      return `<div class="bubble ${entry.role}">${lines}${trace}</div>`
    })
    .join('\n')
  el<HTMLDivElement>('chat-status').textContent = panel.state.sending
    ? panel.state.queued > 0
      ? `running… (${panel.state.queued} queued)`
      : 'running…'
    : ''
  const banner = el<HTMLDivElement>('error-banner')
  banner.textContent = panel.state.errorBanner ?? ''
  banner.style.display = panel.state.errorBanner ? 'block' : 'none'
  log.scrollTop = log.scrollHeight
}

async function showTrace(client: ServiceClient, sessionId: string, turnIndex: number): Promise<void> {
  const pane = el<HTMLDivElement>('trace-pane')
  try {
    const trace = await client.getTrace(sessionId, turnIndex)
    pane.innerHTML = renderTraceHtml(buildTraceView(trace))
  } catch (err) {
    pane.textContent = err instanceof ServiceError ? `${err.code}: ${err.message}` : String(err)
  }
}

async function refreshCorrections(client: ServiceClient, sessionId: string): Promise<void> {
  const pane = el<HTMLDivElement>('corrections-pane')
  try {
    const conversation = await client.getConversation(sessionId)
    pane.innerHTML = conversation.turns
      .map((turn) => {
        const call = turn.tool_call
          ? `<code>${escapeHtml(turn.tool_call.name)} ${escapeHtml(
              JSON.stringify(turn.tool_call.arguments),
            )}</code>`
          : '<em>no tool call</em>'
        return `<div class="turn-row" data-turn="${turn.turn_index}">
          <strong>turn ${turn.turn_index}</strong> ${call}
          <button class="edit-args" data-turn="${turn.turn_index}" ${turn.tool_call ? '' : 'disabled'}>
            edit arguments
          </button>
        </div>`
      })
      .join('\n')
  } catch (err) {
    pane.textContent = String(err)
  }
}

function openEditor(
  client: ServiceClient,
  sessionId: string,
  turnIndex: number,
  toolName: string,
  initial: unknown,
): void {
  const schemas = window.FLOWAGENT_SCHEMAS ?? {}
  const schema = schemas[toolName]
  if (!schema) {
    el<HTMLDivElement>('editor-violations').textContent = `no schema for tool ${toolName}`
    return
  }
  const editor = el<HTMLTextAreaElement>('editor-args')
  const violationsBox = el<HTMLUListElement>('editor-violations')
  const submit = el<HTMLButtonElement>('editor-submit')
  editor.value = JSON.stringify(initial, null, 2)

  const refresh = () => {
    const state = evaluateEditor(schema, editor.value)
    violationsBox.innerHTML = state.parseError
      ? `<li>${escapeHtml(state.parseError)}</li>`
      : state.violations
          .map((v) => `<li><code>${escapeHtml(v.path || '/')}</code> ${escapeHtml(v.reason)}</li>`)
          .join('')
    submit.disabled = !state.canSubmit
    return state
  }
  editor.oninput = refresh
  const state = refresh()

  submit.onclick = async () => {
    const current = evaluateEditor(schema, editor.value)
    if (!current.canSubmit) return
    const outcome = await submitArgumentCorrection(client, sessionId, turnIndex, current)
    if (outcome.ok) {
      violationsBox.innerHTML = '<li class="ok">correction stored</li>'
      await refreshCorrections(client, sessionId)
    } else {
      violationsBox.innerHTML = outcome.serverViolations
        .map((v) => `<li><code>${escapeHtml(v.path || '/')}</code> ${escapeHtml(v.reason)}</li>`)
        .join('')
    }
  }
  void state
}

export async function boot(): Promise<void> {
  const baseUrl = (el<HTMLInputElement>('cfg-url').value || 'http://127.0.0.1:8800').replace(/\/$/, '')
  const token = el<HTMLInputElement>('cfg-token').value || 'desk-token'
  const client = new ServiceClient(baseUrl, token)
  const panel = new ChatPanel(client)
  panel.onChange(() => renderChat(panel))
  const sessionId = await panel.start()

  el<HTMLFormElement>('chat-form').onsubmit = (event) => {
    event.preventDefault()
    const input = el<HTMLInputElement>('chat-input')
    const text = input.value.trim()
    if (!text) return
    input.value = ''
    void panel.send(text).then(() => refreshCorrections(client, sessionId))
  }

  document.addEventListener('click', (event) => {
    const target = event.target as HTMLElement
    if (target.classList.contains('view-trace')) {
      event.preventDefault()
      void showTrace(client, sessionId, Number(target.dataset.turn))
    }
    if (target.classList.contains('edit-args')) {
      const turnIndex = Number(target.dataset.turn)
      void client.getConversation(sessionId).then((conversation) => {
        const turn = conversation.turns[turnIndex]
        if (turn?.tool_call) {
          openEditor(client, sessionId, turnIndex, turn.tool_call.name, turn.tool_call.arguments)
        }
      })
    }
  })
}

if (typeof document !== 'undefined' && document.getElementById('chat-form')) {
  void boot()
}

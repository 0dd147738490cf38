/**
 * End-to-end: the console's client and editor against the real service
 * process, started with the bundled fixture configuration.
 */
import { spawn, type ChildProcess } from 'node:child_process'
import { mkdtempSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'
import { afterAll, beforeAll, describe, expect, it } from 'vitest'

import { ServiceClient } from '../src/api.js'
import { evaluateEditor, submitArgumentCorrection } from '../src/correction.js'
import { buildTraceView } from '../src/traceView.js'
import schemas from './fixtures/schemas.json'
import type { SchemaDoc } from '../src/types.js'

const PORT = 8893
const BASE = `http://127.0.0.1:${PORT}`
let server: ChildProcess | null = null

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/healthz`)
      if (response.ok) return
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200))
  }
  throw new Error('service did not become healthy in time')
}

beforeAll(async () => {
  const cwd = mkdtempSync(join(tmpdir(), 'flowagent-e2e-'))
  server = spawn('flowagent', ['serve', '--port', String(PORT)], {
    cwd,
    stdio: 'ignore',
  })
  await waitForHealth(15000)
}, 20000)

afterAll(() => {
  server?.kill()
})

describe('console against the live service', () => {
  it('runs the full annotate flow: chat, trace, invalid then valid correction', async () => {
    const client = new ServiceClient(BASE, 'desk-token')
    const sessionId = await client.createSession()
    const sent = await client.sendMessage(
      sessionId,
      'I need a birthday gift for my friend, budget about 10610 won',
    )
    expect(sent.response.role).toBe('assistant')

    const trace = await client.getTrace(sessionId, 0)
    const view = buildTraceView(trace)
    expect(view.path[0]).toBe('chat')
    expect(view.path[view.path.length - 1]).toBe('final')

    const recommendSchema = (schemas as Record<string, SchemaDoc>)['recommend_gift']!
    const bad = evaluateEditor(
      recommendSchema,
      JSON.stringify({ occasion: 'birthday', price_max: '50k' }),
    )
    expect(bad.canSubmit).toBe(false) // blocked before it ever reaches the wire

    const good = evaluateEditor(
      recommendSchema,
      JSON.stringify({ occasion: 'birthday', price_max: 50000 }),
    )
    const outcome = await submitArgumentCorrection(client, sessionId, 0, good, 'fixed 50k')
    expect(outcome.ok).toBe(true)

    const conversation = await client.getConversation(sessionId)
    expect(conversation.corrections).toHaveLength(1)

    // Defense in depth: force the invalid payload past the client gate and
    // confirm the server rejects it with the same violation shape.
    const raw = await fetch(`${BASE}/conversations/${sessionId}/corrections`, {
      method: 'POST',
      headers: {
        Authorization: 'Bearer desk-token',
        'Content-Type': 'application/json',
      },
      body: JSON.stringify({
        turn_index: 0,
        target: 'tool_call_arguments',
        replacement: { occasion: 'birthday', price_max: '50k' },
      }),
    })
    expect(raw.status).toBe(422)
    const body = await raw.json()
    expect(body.error.code).toBe('schema_violation')
    expect(body.error.violations[0].path).toBe('/price_max')
  }, 20000)
})

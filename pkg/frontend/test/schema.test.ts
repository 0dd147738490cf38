import { describe, expect, it } from 'vitest'

import { validateValue } from '../src/schema.js'
import schemas from './fixtures/schemas.json'
import type { SchemaDoc } from '../src/types.js'

const recommendSchema = (schemas as Record<string, SchemaDoc>)['recommend_gift']!

describe('client-side argument checker', () => {
  it('accepts a well-formed argument object', () => {
    expect(validateValue(recommendSchema, { occasion: 'birthday', price_max: 50000 })).toEqual([])
  })

  it('flags string-typed numbers with the violation path', () => {
    const violations = validateValue(recommendSchema, { occasion: 'birthday', price_max: '50k' })
    expect(violations).toHaveLength(1)
    expect(violations[0]!.path).toBe('/price_max')
    expect(violations[0]!.reason).toContain('integer')
  })

  it('flags missing required properties at the object', () => {
    const violations = validateValue(recommendSchema, { price_max: 50000 })
    expect(violations.some((v) => v.reason.includes("'occasion'"))).toBe(true)
  })

  it('rejects unexpected properties', () => {
    const violations = validateValue(recommendSchema, { occasion: 'birthday', ghost: 1 })
    expect(violations.map((v) => v.path)).toContain('/ghost')
  })

  it('rejects enum non-members', () => {
    const violations = validateValue(recommendSchema, { occasion: 'Birthday' })
    expect(violations[0]!.path).toBe('/occasion')
  })

  it('booleans are not integers', () => {
    expect(validateValue({ type: 'integer' }, true)).toHaveLength(1)
    expect(validateValue({ type: 'integer' }, 3)).toEqual([])
    expect(validateValue({ type: 'integer' }, 3.5)).toHaveLength(1)
  })

  it('string lengths count code points, not UTF-16 units', () => {
    const schema: SchemaDoc = { type: 'string', max_length: 2 }
    expect(validateValue(schema, '🎁🎂')).toEqual([])
    expect(validateValue(schema, 'abc')).toHaveLength(1)
  })

  it('checks numeric bounds', () => {
    const schema: SchemaDoc = { type: 'integer', minimum: 1, maximum: 12 }
    expect(validateValue(schema, 0)).toHaveLength(1)
    expect(validateValue(schema, 13)).toHaveLength(1)
    expect(validateValue(schema, 6)).toEqual([])
  })

  it('matches the violation shape the server returns', async () => {
    const rejected = (await import('./fixtures/correction_rejected.json')).default as {
      status: number
      body: { error: { violations: { path: string; reason: string }[] } }
    }
    const local = validateValue(recommendSchema, { occasion: 'birthday', price_max: '50k' })
    expect(rejected.status).toBe(422)
    expect(local).toEqual(rejected.body.error.violations)
  })
})

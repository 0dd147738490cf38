/**
 * Client-side mirror of the service's JSON-schema subset validator.
 *
 * Advisory only: the server re-validates every correction. Semantics match
 * the service (strict unknown-property rejection, booleans are not integers,
 * string lengths count code points), so the editor can show the same
 * violation paths the server would return.
 */
import type { SchemaDoc, Violation } from './types.js'

function typeName(value: unknown): string {
  if (value === null) return 'null'
  if (typeof value === 'boolean') return 'boolean'
  if (typeof value === 'number') return 'number'
  if (typeof value === 'string') return 'string'
  if (Array.isArray(value)) return 'array'
  if (typeof value === 'object') return 'object'
  return typeof value
}

function isInt(value: unknown): value is number {
  return typeof value === 'number' && Number.isInteger(value)
}

function codePointLength(value: string): number {
  return [...value].length
}

function literalEqual(a: unknown, b: unknown): boolean {
  if (typeof a === 'boolean' !== (typeof b === 'boolean')) return false
  return a === b
}

export function validateValue(schema: SchemaDoc, value: unknown): Violation[] {
  const out: Violation[] = []
  walk(schema, value, '', out)
  out.sort((x, y) => (x.path + x.reason < y.path + y.reason ? -1 : 1))
  return out
}

function walk(schema: SchemaDoc, value: unknown, path: string, out: Violation[]): void {
  if (schema.enum) {
    if (!schema.enum.some((v) => literalEqual(v, value))) {
      out.push({ path, reason: `not one of the allowed values: ${JSON.stringify(value)}` })
    }
    return
  }
  switch (schema.type) {
    case 'object': {
      if (value === null || typeof value !== 'object' || Array.isArray(value)) {
        out.push({ path, reason: `expected object, got ${typeName(value)}` })
        return
      }
      const record = value as Record<string, unknown>
      const properties = schema.properties ?? {}
      for (const name of [...(schema.required ?? [])].sort()) {
        if (!(name in record)) {
          out.push({ path, reason: `missing required property '${name}'` })
        }
      }
      for (const [name, sub] of Object.entries(properties)) {
        if (name in record) walk(sub, record[name], `${path}/${name}`, out)
      }
      for (const name of Object.keys(record)) {
        if (!(name in properties)) {
          out.push({ path: `${path}/${name}`, reason: 'unexpected property' })
        }
      }
      return
    }
    case 'array': {
      if (!Array.isArray(value)) {
        out.push({ path, reason: `expected array, got ${typeName(value)}` })
        return
      }
      value.forEach((item, i) => walk(schema.items ?? {}, item, `${path}/${i}`, out))
      return
    }
    case 'string': {
      if (typeof value !== 'string') {
        out.push({ path, reason: `expected string, got ${typeName(value)}` })
        return
      }
      const length = codePointLength(value)
      if (schema.min_length !== undefined && length < schema.min_length) {
        out.push({ path, reason: `shorter than min_length ${schema.min_length}` })
      }
      if (schema.max_length !== undefined && length > schema.max_length) {
        out.push({ path, reason: `longer than max_length ${schema.max_length}` })
      }
      return
    }
    case 'integer': {
      if (typeof value === 'boolean' || !isInt(value)) {
        out.push({ path, reason: `expected integer, got ${typeName(value)}` })
        return
      }
      bounds(schema, value, path, out)
      return
    }
    case 'number': {
      if (typeof value === 'boolean' || typeof value !== 'number') {
        out.push({ path, reason: `expected number, got ${typeName(value)}` })
        return
      }
      bounds(schema, value, path, out)
      return
    }
    case 'boolean': {
      if (typeof value !== 'boolean') {
        out.push({ path, reason: `expected boolean, got ${typeName(value)}` })
      }
      return
    }
    default:
      out.push({ path, reason: `unknown schema kind ${JSON.stringify(schema.type)}` })
  }
}

function bounds(schema: SchemaDoc, value: number, path: string, out: Violation[]): void {
  if (schema.minimum !== undefined && value < schema.minimum) {
    out.push({ path, reason: `below minimum ${schema.minimum}` })
  }
  if (schema.maximum !== undefined && value > schema.maximum) {
    out.push({ path, reason: `above maximum ${schema.maximum}` })
  }
}

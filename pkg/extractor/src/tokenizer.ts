/**
 * Prompt tokenization for the class-token bookkeeping the masks rely on.
 *
 * Simple lowercase word tokenizer with start/end markers; multi-word class
 * names map to consecutive token indices, matching how the consumer
 * averages sub-token channels.
 */

export const START_TOKEN = '<|startoftext|>'
export const END_TOKEN = '<|endoftext|>'

export function tokenize (text: string): string[] {
  const words = text
    .toLowerCase()
    .replace(/[^a-z0-9\s]/g, ' ')
    .split(/\s+/)
    .filter(Boolean)
  return [START_TOKEN, ...words, END_TOKEN]
}

export function buildPrompt (template: string, className: string): string {
  if (!template.includes('{}')) {
    throw new Error(`template ${JSON.stringify(template)} has no {} placeholder`)
  }
  return template.replace('{}', className)
}

/** Indices of every sub-token of the class name within the tokenized prompt. */
export function tokenIndices (prompt: string, className: string): number[] {
  const tokens = tokenize(prompt)
  const needle = tokenize(className).slice(1, -1)
  if (needle.length === 0) throw new Error('class name has no tokens')
  for (let start = 1; start + needle.length <= tokens.length - 1; start++) {
    if (needle.every((tok, k) => tokens[start + k] === tok)) {
      return needle.map((_, k) => start + k)
    }
  }
  throw new Error(`class ${JSON.stringify(className)} not found in prompt ` +
    JSON.stringify(prompt))
}

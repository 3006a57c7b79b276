/**
 * ATNB binary tensor files, byte-compatible with the Python consumer.
 *
 * Layout (little-endian): magic "ATNB", u16 version=1, u8 dtype=0 (f32),
 * u8 reserved, u32 dim count, u64 per dimension, then the row-major
 * float32 payload.
 */

import { readFileSync, writeFileSync } from 'node:fs'

const MAGIC = Buffer.from('ATNB', 'ascii')
const VERSION = 1
const DTYPE_F32 = 0

export interface Tensor {
  shape: number[]
  data: Float32Array
}

export function elementCount (shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1)
}

export function encodeTensor (tensor: Tensor): Buffer {
  const { shape, data } = tensor
  if (shape.length < 1 || shape.length > 4) {
    throw new Error(`tensor must have 1-4 dimensions, got ${shape.length}`)
  }
  if (elementCount(shape) !== data.length) {
    throw new Error(`shape ${shape} does not match ${data.length} values`)
  }
  for (const v of data) {
    if (!Number.isFinite(v)) throw new Error('tensor contains non-finite entries')
  }
  const header = Buffer.alloc(12 + 8 * shape.length)
  MAGIC.copy(header, 0)
  header.writeUInt16LE(VERSION, 4)
  header.writeUInt8(DTYPE_F32, 6)
  header.writeUInt8(0, 7)
  header.writeUInt32LE(shape.length, 8)
  shape.forEach((dim, i) => header.writeBigUInt64LE(BigInt(dim), 12 + 8 * i))
  const payload = Buffer.from(data.buffer, data.byteOffset, data.byteLength)
  return Buffer.concat([header, payload])
}

export function writeTensor (tensor: Tensor, path: string): void {
  writeFileSync(path, encodeTensor(tensor))
}

export function decodeTensor (raw: Buffer): Tensor {
  if (raw.length < 12) throw new Error('truncated header')
  if (!raw.subarray(0, 4).equals(MAGIC)) throw new Error('bad magic')
  if (raw.readUInt16LE(4) !== VERSION) throw new Error('unsupported version')
  if (raw.readUInt8(6) !== DTYPE_F32) throw new Error('unsupported dtype')
  const ndim = raw.readUInt32LE(8)
  if (ndim < 1 || ndim > 4) throw new Error(`bad dimension count ${ndim}`)
  const dimsEnd = 12 + 8 * ndim
  if (raw.length < dimsEnd) throw new Error('truncated dimension table')
  const shape: number[] = []
  for (let i = 0; i < ndim; i++) {
    shape.push(Number(raw.readBigUInt64LE(12 + 8 * i)))
  }
  const count = elementCount(shape)
  if (raw.length !== dimsEnd + 4 * count) {
    throw new Error(`payload is ${raw.length - dimsEnd} bytes, expected ${4 * count}`)
  }
  // copy out to guarantee alignment for the Float32Array view
  const payload = new Uint8Array(raw.subarray(dimsEnd)).buffer
  return { shape, data: new Float32Array(payload) }
}

export function readTensor (path: string): Tensor {
  return decodeTensor(readFileSync(path))
}

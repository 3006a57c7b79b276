/**
 * Streaming multi-scale aggregation.
 *
 * Each incoming map is divided by its global maximum and added to a running
 * float64 sum; the final aggregate is the uniform mean over every map the
 * group received (all layers of one resolution across all timesteps). This
 * keeps only one accumulator per (kind, scale) in memory instead of the full
 * per-layer/per-timestep stack.
 */

export class StreamingAggregator {
  private sum: Float64Array | null = null
  private count = 0

  add (map: Float32Array | Float64Array): void {
    if (this.sum !== null && this.sum.length !== map.length) {
      throw new Error(`map size ${map.length} != accumulator ${this.sum.length}`)
    }
    let max = -Infinity
    for (let i = 0; i < map.length; i++) {
      if (map[i] > max) max = map[i]
    }
    if (!(max > 0)) throw new Error('attention map is identically zero')
    if (this.sum === null) this.sum = new Float64Array(map.length)
    const sum = this.sum
    for (let i = 0; i < map.length; i++) sum[i] += map[i] / max
    this.count += 1
  }

  get mapCount (): number {
    return this.count
  }

  /** Mean of the normalized maps, cast to float32. */
  finish (): Float32Array {
    if (this.sum === null || this.count === 0) {
      throw new Error('no maps were aggregated')
    }
    const out = new Float32Array(this.sum.length)
    for (let i = 0; i < out.length; i++) out[i] = this.sum[i] / this.count
    return out
  }
}

/** Reference batch form of the same reduction, for equivalence checks. */
export function batchAggregate (maps: Array<Float32Array | Float64Array>): Float32Array {
  const agg = new StreamingAggregator()
  for (const m of maps) agg.add(m)
  return agg.finish()
}

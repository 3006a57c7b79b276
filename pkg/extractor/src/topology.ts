/**
 * Attention topology of the hooked denoising UNet: 16 transformer blocks,
 * each carrying one cross-attention and one self-attention layer, spread
 * over four spatial resolutions (encoder 64/32/16, mid 8, decoder 16/32/64).
 */

export const LAYER_SCALES: readonly number[] = [
  64, 64, // down blocks
  32, 32,
  16, 16,
  8, // mid block
  16, 16, 16, // up blocks
  32, 32, 32,
  64, 64, 64,
]

export const LAYER_COUNT = LAYER_SCALES.length // 16

export const SCALES = [8, 16, 32, 64] as const

export function layersAtScale (scale: number): number[] {
  const layers: number[] = []
  LAYER_SCALES.forEach((s, i) => {
    if (s === scale) layers.push(i + 1) // layer indices are 1-based
  })
  return layers
}

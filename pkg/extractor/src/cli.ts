#!/usr/bin/env node
/**
 * extract --class X [--template "a photo of a {}"] [--seed N]
 *         [--timesteps T] [--mode aggregated|full] --out DIR
 */

import { extract, DEFAULT_TEMPLATE } from './extract.js'

interface Args {
  className?: string
  template: string
  seed: number
  timesteps: number
  mode: 'aggregated' | 'full'
  out?: string
}

function parseArgs (argv: string[]): Args {
  const args: Args = {
    template: DEFAULT_TEMPLATE,
    seed: 0,
    timesteps: 50,
    mode: 'aggregated',
  }
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i]
    const value = () => {
      const v = argv[++i]
      if (v === undefined) throw new Error(`missing value for ${flag}`)
      return v
    }
    switch (flag) {
      case '--class': args.className = value(); break
      case '--template': args.template = value(); break
      case '--seed': args.seed = Number(value()); break
      case '--timesteps': args.timesteps = Number(value()); break
      case '--mode': {
        const m = value()
        if (m !== 'aggregated' && m !== 'full') throw new Error(`bad mode ${m}`)
        args.mode = m
        break
      }
      case '--out': args.out = value(); break
      default: throw new Error(`unknown flag ${flag}`)
    }
  }
  return args
}

export function main (argv: string[]): number {
  let args: Args
  try {
    args = parseArgs(argv)
    if (!args.className || !args.out) {
      throw new Error('both --class and --out are required')
    }
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`)
    console.error('usage: extract --class X [--template "a photo of a {}"] ' +
      '[--seed N] [--timesteps T] [--mode aggregated|full] --out DIR')
    return 1
  }
  try {
    const dir = extract({
      className: args.className,
      template: args.template,
      samplerSeed: args.seed,
      timesteps: args.timesteps,
      mode: args.mode,
      outDir: args.out,
    })
    console.log(`wrote attention dump to ${dir}`)
    return 0
  } catch (err) {
    console.error(`error: ${(err as Error).message}`)
    return 2
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)))
}

#!/usr/bin/env node
import { FIGURE_KINDS, renderFigure } from './plot.js'
import type { FigureKind } from './plot.js'

const USAGE =
  'usage: plot --traces <dir> --kind {distance|loss|stationarity} --out <path.{svg,png}>'

const parseFlags = (args: string[]): Map<string, string> => {
  const flags = new Map<string, string>()
  for (let i = 0; i < args.length; i += 2) {
    const key = args[i]
    const value = args[i + 1]
    if (!key.startsWith('--') || value === undefined) {
      throw new Error(USAGE)
    }
    flags.set(key.slice(2), value)
  }
  return flags
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2)
  if (command !== 'plot') {
    console.error(USAGE)
    return 1
  }
  try {
    const flags = parseFlags(rest)
    const traces = flags.get('traces')
    const kind = flags.get('kind')
    const out = flags.get('out')
    if (!traces || !kind || !out) throw new Error(USAGE)
    if (!FIGURE_KINDS.includes(kind as FigureKind)) {
      throw new Error(`unknown kind ${kind}; ${USAGE}`)
    }
    await renderFigure(traces, kind as FigureKind, out)
    console.log(out)
    return 0
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`)
    return 1
  }
}

main().then((code) => {
  process.exitCode = code
})

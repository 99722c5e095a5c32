#!/usr/bin/env node
import { writeFileSync } from 'fs';

import { SchemaError } from './csv';
import { DEFAULT_STYLE, FigureKind, renderFigure, Style } from './figures';
import { HashMismatchError, loadManifest, verifyArtifact } from './manifest';

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    if (argv[i].startsWith('--')) {
      out.set(argv[i].slice(2), argv[i + 1] ?? '');
      i++;
    } else {
      out.set(`_${i}`, argv[i]);
    }
  }
  return out;
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  if (args.get('_0') !== 'render') {
    console.error('usage: plot render --kind K --in data.csv --manifest manifest.json --out fig.svg');
    return 2;
  }
  const kind = args.get('kind') as FigureKind | undefined;
  const input = args.get('in');
  const outPath = args.get('out');
  const manifestPath = args.get('manifest');
  if (!kind || !input || !outPath || !manifestPath) {
    console.error('missing required flag: --kind, --in, --manifest, --out');
    return 2;
  }
  const style: Style = {
    ...DEFAULT_STYLE,
    width: Number(args.get('width') ?? DEFAULT_STYLE.width),
    height: Number(args.get('height') ?? DEFAULT_STYLE.height),
    title: args.get('title'),
  };
  const band = args.get('band');
  if (band) {
    const [a, eps] = band.split(':').map(Number);
    style.band = { a, eps };
  }
  try {
    const manifest = loadManifest(manifestPath);
    const configHash = verifyArtifact(manifest, input);
    const svg = renderFigure(kind, input, style, configHash);
    writeFileSync(outPath, svg);
  } catch (err) {
    if (err instanceof HashMismatchError) {
      console.error(`hash-mismatch: ${err.message}`);
      return 3;
    }
    if (err instanceof SchemaError) {
      console.error(`schema-mismatch: ${err.message}`);
      return 4;
    }
    throw err;
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}

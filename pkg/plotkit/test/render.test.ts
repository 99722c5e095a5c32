import { mkdtempSync, readFileSync, writeFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { describe, expect, it } from 'vitest';

import { readCsv, column, SchemaError } from '../src/csv';
import { DEFAULT_STYLE, FigureKind, renderFigure } from '../src/figures';
import { HashMismatchError, configHash, loadManifest, verifyArtifact } from '../src/manifest';
import { main } from '../src/cli';

const FIX = join(__dirname, 'fixtures');
const MANIFEST = join(FIX, 'manifest.json');

const KINDS: [FigureKind, string][] = [
  ['profile', 'profile.csv'],
  ['levelset', 'jset.csv'],
  ['ledger', 'ledger.csv'],
  ['coverage', 'coverage.csv'],
  ['escape', 'escape.csv'],
  ['gauss', 'gauss.csv'],
];

describe('figure rendering', () => {
  const manifest = loadManifest(MANIFEST);
  const hash = configHash(manifest);

  it.each(KINDS)('renders %s without error', (kind, file) => {
    const svg = renderFigure(kind, join(FIX, file), DEFAULT_STYLE, hash);
    expect(svg.startsWith('<svg')).toBe(true);
    expect(svg).toContain('</svg>');
    expect(svg).toContain(`config ${hash}`); // caption embeds the config hash
  });

  it.each(KINDS)('re-rendering %s is byte-identical', (kind, file) => {
    const a = renderFigure(kind, join(FIX, file), DEFAULT_STYLE, hash);
    const b = renderFigure(kind, join(FIX, file), DEFAULT_STYLE, hash);
    expect(Buffer.from(a).equals(Buffer.from(b))).toBe(true);
  });

  it('profile overlays the target band when styled', () => {
    const svg = renderFigure('profile', join(FIX, 'profile.csv'),
      { ...DEFAULT_STYLE, band: { a: 0, eps: 0.5 } }, hash);
    expect(svg).toContain('#fdd');
  });
});

describe('artifact verification', () => {
  it('accepts artifacts whose hash matches the manifest', () => {
    const manifest = loadManifest(MANIFEST);
    expect(verifyArtifact(manifest, join(FIX, 'profile.csv')))
      .toBe(configHash(manifest));
  });

  it('refuses tampered artifacts', () => {
    const dir = mkdtempSync(join(tmpdir(), 'plotkit-'));
    const tampered = join(dir, 'profile.csv');
    writeFileSync(tampered, readFileSync(join(FIX, 'profile.csv'), 'utf8') + '\n');
    const manifest = loadManifest(MANIFEST);
    expect(() => verifyArtifact(manifest, tampered)).toThrow(HashMismatchError);
  });

  it('refuses unlisted artifacts', () => {
    const dir = mkdtempSync(join(tmpdir(), 'plotkit-'));
    const stray = join(dir, 'stray.csv');
    writeFileSync(stray, 'a,b\n1,2\n');
    const manifest = loadManifest(MANIFEST);
    expect(() => verifyArtifact(manifest, stray)).toThrow(HashMismatchError);
  });
});

describe('schema checks', () => {
  it('reports missing columns by name', () => {
    const t = readCsv(join(FIX, 'gauss.csv'));
    expect(() => column(t, 'no_such_column', 'gauss.csv')).toThrow(SchemaError);
    expect(() => renderFigure('escape', join(FIX, 'gauss.csv'), DEFAULT_STYLE,
      'x')).toThrow(SchemaError);
  });

  it('rejects ragged rows', () => {
    const dir = mkdtempSync(join(tmpdir(), 'plotkit-'));
    const bad = join(dir, 'bad.csv');
    writeFileSync(bad, 'a,b\n1\n');
    expect(() => readCsv(bad)).toThrow(SchemaError);
  });
});

describe('cli', () => {
  it('renders through the command line and is deterministic', () => {
    const dir = mkdtempSync(join(tmpdir(), 'plotkit-'));
    const out1 = join(dir, 'fig1.svg');
    const out2 = join(dir, 'fig2.svg');
    for (const out of [out1, out2]) {
      const code = main(['render', '--kind', 'coverage', '--in',
        join(FIX, 'coverage.csv'), '--manifest', MANIFEST, '--out', out]);
      expect(code).toBe(0);
    }
    expect(readFileSync(out1, 'utf8')).toBe(readFileSync(out2, 'utf8'));
  });

  it('exits nonzero on hash mismatch', () => {
    const dir = mkdtempSync(join(tmpdir(), 'plotkit-'));
    const tampered = join(dir, 'coverage.csv');
    writeFileSync(tampered,
      readFileSync(join(FIX, 'coverage.csv'), 'utf8') + '\n');
    const code = main(['render', '--kind', 'coverage', '--in', tampered,
      '--manifest', MANIFEST, '--out', join(dir, 'fig.svg')]);
    expect(code).toBe(3);
  });

  it('exits nonzero on missing flags', () => {
    expect(main(['render', '--kind', 'coverage'])).toBe(2);
  });
});

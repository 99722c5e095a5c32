import { createHash } from 'crypto';
import { readFileSync } from 'fs';
import { basename } from 'path';

export class HashMismatchError extends Error {}

export interface Manifest {
  artifacts: { path: string; sha256: string; bytes: number }[];
  config: unknown;
}

export function loadManifest(path: string): Manifest {
  return JSON.parse(readFileSync(path, 'utf8')) as Manifest;
}

/** Verify an artifact against its manifest entry; returns the config hash. */
export function verifyArtifact(manifest: Manifest, artifactPath: string): string {
  const name = basename(artifactPath);
  const entry = manifest.artifacts.find((a) => basename(a.path) === name);
  if (!entry) {
    throw new HashMismatchError(`artifact '${name}' not listed in the manifest`);
  }
  const digest = createHash('sha256').update(readFileSync(artifactPath)).digest('hex');
  if (digest !== entry.sha256) {
    throw new HashMismatchError(
      `artifact '${name}' hash ${digest.slice(0, 12)} != manifest ${entry.sha256.slice(0, 12)}`,
    );
  }
  return configHash(manifest);
}

export function configHash(manifest: Manifest): string {
  const blob = JSON.stringify(manifest.config ?? null);
  return createHash('sha256').update(blob).digest('hex').slice(0, 12);
}

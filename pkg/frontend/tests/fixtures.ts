/** Mocked API payloads mirroring the service's bundled fixture project:
 * a two-package repo labelled against a small taxonomy. */

import { FilePayload, PackagePayload, ProjectPayload, TaxonomyPayload } from '../src/api';

export const SHA = 'deadbeefdeadbeefdeadbeefdeadbeefdeadbeef';

export const taxonomy: TaxonomyPayload = {
  m: 12,
  labels: Array.from({ length: 12 }, (_, i) => ({ id: i, name: `domain ${i}` })),
};

/** Exactly 10 ranked labels, strictly descending. */
export const project: ProjectPayload = {
  name: 'fixture',
  sha: SHA,
  fingerprint: 'fp0',
  status: 'annotated',
  n_files: 30,
  n_annotated: 29,
  top_labels: Array.from({ length: 10 }, (_, i) => ({
    id: [0, 1, 4, 2, 7, 3, 9, 5, 8, 6][i],
    name: `domain ${[0, 1, 4, 2, 7, 3, 9, 5, 8, 6][i]}`,
    probability: 0.3 - i * 0.025,
  })),
};

export const packages: PackagePayload[] = [
  {
    package: 'com.example.image',
    status: 'annotated',
    n_files: 11,
    n_annotated: 10,
    top_labels: [
      { id: 1, name: 'domain 1', probability: 0.8 },
      { id: 0, name: 'domain 0', probability: 0.2 },
    ],
  },
  {
    package: 'com.example.ui',
    status: 'annotated',
    n_files: 19,
    n_annotated: 19,
    top_labels: [{ id: 0, name: 'domain 0', probability: 0.95 }],
  },
];

export const imageFiles: FilePayload[] = [
  ...Array.from({ length: 10 }, (_, i) => ({
    path: `src/com/example/image/File${i}.java`,
    package: 'com.example.image',
    status: 'annotated' as const,
    fallback: false,
    jsd: 0.5,
    top_labels: [{ id: 1, name: 'domain 1', probability: 1.0 }],
  })),
  {
    path: 'src/com/example/image/MixedScratchPad.java',
    package: 'com.example.image',
    status: 'unannotated',
    fallback: false,
    jsd: 0.02,
    top_labels: [],
  },
];

/** fetch stub answering the endpoints the views consume. */
export function fakeFetch(input: RequestInfo | URL): Promise<Response> {
  const url = String(input);
  const respond = (body: unknown, status = 200) =>
    Promise.resolve(
      new Response(JSON.stringify(body), {
        status,
        headers: { 'Content-Type': 'application/json' },
      })
    );
  if (url.endsWith('/api/v1/taxonomy')) return respond(taxonomy);
  if (url.endsWith('/api/v1/projects')) {
    return respond([{ name: 'fixture', versions: [{ sha: SHA, fingerprints: ['fp0'] }] }]);
  }
  if (url.endsWith(`/projects/fixture/${SHA}/project`)) return respond(project);
  if (url.endsWith(`/projects/fixture/${SHA}/packages`)) return respond(packages);
  if (url.endsWith(`/packages/com.example.image/files`)) return respond(imageFiles);
  return respond({ detail: `no stub for ${url}` }, 404);
}

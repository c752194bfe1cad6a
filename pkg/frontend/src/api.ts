/** Typed client for the annotation service API. The dashboard performs no
 * annotation math of its own: every number rendered comes straight from one
 * of these payloads. */

export interface LabelEntry {
  id: number;
  name: string;
  probability: number;
}

export interface TaxonomyPayload {
  m: number;
  labels: { id: number; name: string }[];
}

export interface JobPayload {
  job_id: string;
  state: 'queued' | 'running' | 'done' | 'failed';
  progress?: { done: number; total: number };
  result?: { name: string; sha: string; fingerprint: string };
  error?: string;
}

export interface ProjectPayload {
  name: string;
  sha: string;
  fingerprint: string;
  status: 'annotated' | 'unannotated';
  n_files: number;
  n_annotated: number;
  top_labels: LabelEntry[];
}

export interface PackagePayload {
  package: string;
  status: 'annotated' | 'unannotated';
  n_files: number;
  n_annotated: number;
  top_labels: LabelEntry[];
}

export interface FilePayload {
  path: string;
  package: string;
  status: 'annotated' | 'unannotated';
  fallback: boolean;
  jsd: number | null;
  top_labels: LabelEntry[];
}

export interface ProjectListing {
  name: string;
  versions: { sha: string; fingerprints: string[] }[];
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

const BASE = '/api/v1';

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(`${BASE}${path}`, init);
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      if (body && typeof body.detail === 'string') detail = body.detail;
    } catch {
      /* non-JSON error body; keep statusText */
    }
    throw new ApiError(resp.status, detail);
  }
  return resp.json() as Promise<T>;
}

export const api = {
  submitAnalysis(body: {
    name: string;
    remote_url: string;
    language: string;
    sha?: string;
  }): Promise<JobPayload> {
    return request('/analyses', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  },

  jobStatus(jobId: string): Promise<JobPayload> {
    return request(`/analyses/${encodeURIComponent(jobId)}`);
  },

  listProjects(): Promise<ProjectListing[]> {
    return request('/projects');
  },

  project(name: string, sha: string): Promise<ProjectPayload> {
    return request(`/projects/${encodeURIComponent(name)}/${sha}/project`);
  },

  packages(name: string, sha: string): Promise<PackagePayload[]> {
    return request(`/projects/${encodeURIComponent(name)}/${sha}/packages`);
  },

  files(name: string, sha: string, pkg: string): Promise<FilePayload[]> {
    return request(
      `/projects/${encodeURIComponent(name)}/${sha}/packages/${encodeURIComponent(pkg)}/files`
    );
  },

  taxonomy(): Promise<TaxonomyPayload> {
    return request('/taxonomy');
  },
};

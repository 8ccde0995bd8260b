import type {
  EntityHistory,
  ProjectRecord,
  SceneDocument,
  TimelineDocument,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/**
 * Thin client for the analysis service. The UI never computes anything
 * itself; every document comes from these endpoints.
 */
export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn: FetchLike = fetch.bind(globalThis)) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.base}/api/v1${path}`);
    if (!response.ok) {
      throw new ApiError(response.status, await safeDetail(response));
    }
    return (await response.json()) as T;
  }

  async analyze(repoUrl: string, branch?: string): Promise<{ project_id: string; status: string }> {
    const response = await this.fetchFn(`${this.base}/api/v1/analyze`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ repo_url: repoUrl, branch: branch ?? null }),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await safeDetail(response));
    }
    return (await response.json()) as { project_id: string; status: string };
  }

  listProjects(): Promise<{ projects: ProjectRecord[] }> {
    return this.get("/projects");
  }

  getProject(projectId: string): Promise<ProjectRecord> {
    return this.get(`/projects/${projectId}`);
  }

  getScene(projectId: string, ordinal: number): Promise<SceneDocument> {
    return this.get(`/projects/${projectId}/scenes/${ordinal}`);
  }

  getTimeline(projectId: string): Promise<TimelineDocument> {
    return this.get(`/projects/${projectId}/timeline`);
  }

  getEntityHistory(projectId: string, artifact: string): Promise<EntityHistory> {
    return this.get(`/projects/${projectId}/entities/${artifact}/history`);
  }
}

async function safeDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}

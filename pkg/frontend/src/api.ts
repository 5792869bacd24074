// Thin typed client over the service API.  Every view talks to the server
// through this module; nothing in the UI generates content on its own.

import type {
  CommentForest,
  CommentRecord,
  JobRecord,
  ReplyResult,
  UploadResult,
  VideoListEntry,
  VideoRecord,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly kind: string,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

let authToken: string | null = null;

/** Token sent as X-Auth-Token on mutating requests; reads stay open. */
export function setAuthToken(token: string | null): void {
  authToken = token;
}

async function request<T>(path: string, init: RequestInit = {}): Promise<T> {
  const headers = new Headers(init.headers);
  const method = init.method ?? "GET";
  if (authToken !== null && method !== "GET") {
    headers.set("X-Auth-Token", authToken);
  }
  const response = await fetch(path, { ...init, headers });
  if (!response.ok) {
    let kind = "HttpError";
    let detail = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      if (body && typeof body === "object") {
        kind = body.error ?? kind;
        detail = body.detail ?? detail;
      }
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(response.status, kind, detail);
  }
  return response.json() as Promise<T>;
}

function postJson<T>(path: string, payload: unknown): Promise<T> {
  return request<T>(path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
}

export interface UploadFields {
  file: File;
  title: string;
  description?: string;
  author?: string;
  thumbnail?: File | null;
}

export function uploadVideo(fields: UploadFields): Promise<UploadResult> {
  const form = new FormData();
  form.append("file", fields.file);
  form.append("title", fields.title);
  form.append("description", fields.description ?? "");
  form.append("author", fields.author ?? "");
  if (fields.thumbnail) {
    form.append("thumbnail", fields.thumbnail);
  }
  return request<UploadResult>("/api/videos", { method: "POST", body: form });
}

export function listVideos(): Promise<{ videos: VideoListEntry[] }> {
  return request("/api/videos");
}

export function getVideo(videoId: string): Promise<VideoRecord> {
  return request(`/api/videos/${encodeURIComponent(videoId)}`);
}

export function getJob(jobId: string): Promise<JobRecord> {
  return request(`/api/jobs/${encodeURIComponent(jobId)}`);
}

export function getComments(videoId: string): Promise<CommentForest> {
  return request(`/api/videos/${encodeURIComponent(videoId)}/comments`);
}

export function postReply(commentId: string, body: string): Promise<ReplyResult> {
  return postJson(`/api/comments/${encodeURIComponent(commentId)}/reply`, { body });
}

export function postPersonaComment(
  videoId: string,
  personaText: string,
): Promise<CommentRecord & { persona_text: string | null }> {
  return postJson(`/api/videos/${encodeURIComponent(videoId)}/persona-comments`, {
    persona_text: personaText,
  });
}

export function requestMoreComments(
  videoId: string,
  count: number,
): Promise<{ job_id: string }> {
  return postJson(`/api/videos/${encodeURIComponent(videoId)}/generate`, { count });
}

export function videoFileUrl(videoId: string): string {
  return `/api/videos/${encodeURIComponent(videoId)}/file`;
}

export function thumbnailUrl(videoId: string): string {
  return `/api/videos/${encodeURIComponent(videoId)}/thumbnail`;
}

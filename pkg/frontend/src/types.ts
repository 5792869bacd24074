// Payload shapes of the service API (see docs/api.md in the repository root).

export type JobStage =
  | "queued"
  | "transcribing"
  | "captioning"
  | "summarizing"
  | "ranking_personas"
  | "generating_comments"
  | "done"
  | "failed";

export interface VideoRecord {
  video_id: string;
  title: string;
  description: string;
  author: string;
  duration: number;
  upload_time: string;
  has_thumbnail: boolean;
}

export interface JobSnapshot {
  job_id: string;
  stage: JobStage;
  progress: number;
}

export interface VideoListEntry extends VideoRecord {
  latest_job: JobSnapshot | null;
}

export interface StageEvent {
  stage: string;
  at: string;
}

export interface JobRecord {
  job_id: string;
  video_id: string;
  kind: "full" | "generate";
  count: number;
  no_persona: boolean;
  stage: JobStage;
  progress: number;
  error: string | null;
  created_at: string;
  updated_at: string;
  stage_history: StageEvent[];
}

export interface CommentRecord {
  comment_id: string;
  video_id: string;
  kind: "primary" | "thread" | "reply";
  body: string;
  author_name: string;
  avatar_seed: string;
  persona_id: string | null;
  parent_id: string | null;
  created_at: string;
}

/** One node of the comment forest; persona_text is set iff persona_id is. */
export interface CommentNode extends CommentRecord {
  persona_text: string | null;
  children: CommentNode[];
}

export interface CommentForest {
  comments: CommentNode[];
  active_job: string | null;
}

export interface ReplyResult {
  user_comment: CommentRecord;
  generated_comment: CommentRecord;
}

export interface UploadResult {
  video_id: string;
  job_id: string;
}

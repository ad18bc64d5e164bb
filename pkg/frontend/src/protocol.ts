/** Wire protocol shared with the session service. */

export type Pose = [number, number, number]; // x, y, rotation (scene units, radians)
export type FrameRow = [number, number, number, number, number, number];

export interface Settings {
  name0: string;
  name1: string;
  description0?: string;
  description1?: string;
  scene?: string;
  portrait0?: string | null;
  portrait1?: string | null;
}

export type ClientEvent =
  | { type: "set_settings"; settings: Settings }
  | { type: "pointer_frame"; char: 0 | 1; x: number; y: number; r?: number }
  | { type: "pointer_release"; char: 0 | 1 }
  | { type: "set_auto"; on: boolean }
  | { type: "generate_motion_both" }
  | { type: "generate_text"; user_prompt?: string; swap_active?: boolean; segment?: number }
  | { type: "write_text"; segment?: number | null; text: string }
  | { type: "edit_text"; segment: number; text: string }
  | { type: "delete_after"; frame: number }
  | { type: "resize_segment"; segment: number; new_end: number }
  | { type: "seek"; frame: number }
  | { type: "play" };

export interface SegmentInfo {
  id: number;
  start: number;
  end: number;
  text: string | null;
  text_origin?: string | null;
  motion_origin?: (string | null)[];
}

export type ServerEvent = { session?: string; seq?: number } & (
  | { type: "frame"; t: number; poses: [Pose, Pose]; segment: number }
  | { type: "action_preview"; terms: [string, number][]; active: 0 | 1 }
  | { type: "segment_opened"; segment: SegmentInfo }
  | { type: "segment_pending"; segment: number }
  | { type: "text_ready"; segment: number; text: string }
  | { type: "timeline"; segments: SegmentInfo[]; frames?: number }
  | { type: "cursor"; frame: number }
  | { type: "playback_frame"; t: number; poses: [Pose, Pose]; segment: number | null }
  | { type: "playback_done" }
  | { type: "settings"; settings: Settings }
  | { type: "warning"; message: string }
  | { type: "error"; message: string }
);

export interface StoryExport {
  settings: Settings;
  fps: number;
  frame_count: number;
  segments: (SegmentInfo & { frames: FrameRow[] })[];
}

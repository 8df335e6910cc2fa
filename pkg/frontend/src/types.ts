// Shapes of the annotation backend's JSON payloads.

export type PositionalLabel = "first" | "second" | "tie";

export interface Task {
  task_id: string;
  context: string;
  candidate_1: string;
  candidate_2: string;
}

export interface NextTaskResponse {
  task: Task | null; // null once this annotator has labeled everything
  labeled: number;
  total: number;
}

export interface AgreementStats {
  kappa: number;
  agreement: number;
  n: number;
}

export interface AgreementResponse {
  vs_judge: Record<string, AgreementStats>;
  between_annotators: Record<string, AgreementStats>;
  avg_kappa_vs_judge?: number;
}

export interface ProgressResponse {
  tasks: number;
  annotators: number;
  expected_labels: number;
  submitted: number;
  by_annotator: Record<string, number>;
}

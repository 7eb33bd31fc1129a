/** Wire types for the protocol service API (v1). */

export type Status = 'success' | 'failure' | 'running';

export type NodeKind =
  | 'root'
  | 'sequence'
  | 'selector'
  | 'parallel'
  | 'decorator'
  | 'recovery'
  | 'action'
  | 'query';

export interface TreeNode {
  id: string;
  kind: NodeKind;
  label?: string;
  name?: string;
  children: string[];
  threshold?: number;
  policy?: {
    type: 'retry' | 'repeat_until' | 'timer';
    maxAttempts?: number;
    periodKey?: string;
  };
}

export interface TreeDoc {
  rootId: string;
  name: string;
  nodes: Record<string, TreeNode>;
}

export interface Pending {
  kind: 'outcome' | 'advance';
  leafName: string;
  nodeId: string;
  prompt: string;
  /** advance only: virtual time of the next scheduled wake, in seconds */
  due?: number;
}

export interface SessionView {
  id: string;
  protocol: string;
  status: Status;
  pending: Pending | null;
  time: number;
  blackboard: Record<string, unknown>;
  nodeStatuses: Record<string, Status | null>;
  traceLength: number;
  tree?: TreeDoc;
}

export interface ProtocolSummary {
  name: string;
  title: string;
  source: 'bundled' | 'uploaded';
  leafCount: number;
  notes: string;
}

export interface TraceEvent {
  t: number;
  kind: 'node_entered' | 'node_returned' | 'blackboard_write' | 'halted' | 'event_applied';
  node?: string | null;
  status?: Status | null;
  key?: string | null;
  value?: unknown;
}

export interface TracePage {
  page: number;
  pageSize: number;
  total: number;
  events: TraceEvent[];
}

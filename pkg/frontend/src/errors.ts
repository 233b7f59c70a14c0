/** Error types with stable codes, mirrored on the CLI's stderr output. */

export class BridgeError extends Error {
  readonly code: string = 'BridgeError'
}

export class BackendUnavailable extends BridgeError {
  override readonly code = 'BackendUnavailable'
}

export class UnmappedTag extends BridgeError {
  override readonly code = 'UnmappedTag'
  constructor(readonly tags: string[]) {
    super(`backend emitted tags with no rename mapping: ${tags.join(', ')}`)
  }
}

export class MalformedDocument extends BridgeError {
  override readonly code = 'MalformedDocument'
  constructor(readonly problems: string[]) {
    super(`document failed validation:\n  ${problems.join('\n  ')}`)
  }
}

export class BadConfig extends BridgeError {
  override readonly code = 'BadConfig'
}

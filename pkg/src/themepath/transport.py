"""HTTP plumbing shared by the embedding and chat providers."""

from __future__ import annotations

import time

import requests

from .errors import ProtocolError, TransportError

# Patchable in tests so retry paths run instantly.
_sleep = time.sleep

_RETRYABLE_STATUS = {408, 429, 500, 502, 503, 504}


def post_json(
    url: str,
    payload: dict,
    headers: dict | None = None,
    timeout: float = 30.0,
    max_retries: int = 3,
    backoff_base: float = 0.5,
) -> dict:
    """POST a JSON payload and return the decoded JSON response.

    Connection failures and retryable HTTP statuses are retried with
    exponential backoff (max_retries additional attempts).  Anything that
    comes back 2xx but is not JSON raises ProtocolError.
    """
    last_error: Exception | None = None
    for attempt in range(max_retries + 1):
        if attempt > 0:
            _sleep(backoff_base * (2 ** (attempt - 1)))
        try:
            resp = requests.post(url, json=payload, headers=headers, timeout=timeout)
        except requests.RequestException as exc:
            last_error = exc
            continue
        if resp.status_code in _RETRYABLE_STATUS:
            last_error = TransportError(f"HTTP {resp.status_code} from {url}")
            continue
        if not 200 <= resp.status_code < 300:
            raise ProtocolError(f"HTTP {resp.status_code} from {url}: {resp.text[:200]}")
        try:
            return resp.json()
        except ValueError as exc:
            raise ProtocolError(f"non-JSON response from {url}") from exc
    raise TransportError(f"{url} unreachable after {max_retries + 1} attempts: {last_error}")

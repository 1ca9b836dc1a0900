"""Small JSON-over-HTTP POST helper with bounded retries.

Both remote services this library can talk to (embedding, text
generation) use the same discipline: POST a JSON body, expect a JSON
object back, retry transient failures with exponential backoff, and
surface a single error carrying the attempt count once the budget is
exhausted.
"""

from __future__ import annotations

import logging
import time

import requests

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 60.0
DEFAULT_MAX_ATTEMPTS = 3
DEFAULT_BACKOFF = 0.5


class TransportError(RuntimeError):
    """All attempts against a remote endpoint failed."""

    def __init__(self, message: str, attempts: int):
        self.attempts = attempts
        self.message = message
        super().__init__(f"{message} (after {attempts} attempt(s))")


def post_json(
    url: str,
    payload: dict,
    token: str | None = None,
    timeout: float = DEFAULT_TIMEOUT,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    backoff: float = DEFAULT_BACKOFF,
) -> tuple[dict, int]:
    """POST ``payload`` to ``url`` and return ``(response_json, retries)``.

    Retries on connection errors, timeouts, non-2xx statuses, and bodies
    that are not a JSON object, sleeping ``backoff * 2**i`` between
    attempts.  Raises :class:`TransportError` once ``max_attempts`` have
    failed.
    """
    headers = {"Content-Type": "application/json"}
    if token:
        headers["Authorization"] = f"Bearer {token}"
    last_failure = "no attempt made"
    for attempt in range(max_attempts):
        if attempt:
            time.sleep(backoff * (2 ** (attempt - 1)))
        try:
            resp = requests.post(url, json=payload, headers=headers, timeout=timeout)
        except requests.RequestException as exc:
            last_failure = f"request failed: {exc}"
            logger.debug("attempt %d against %s failed: %s", attempt + 1, url, exc)
            continue
        if not 200 <= resp.status_code < 300:
            last_failure = f"HTTP {resp.status_code}"
            logger.debug(
                "attempt %d against %s returned %d", attempt + 1, url, resp.status_code
            )
            continue
        try:
            body = resp.json()
        except ValueError as exc:
            last_failure = f"response is not JSON: {exc}"
            continue
        if not isinstance(body, dict):
            last_failure = "response JSON is not an object"
            continue
        return body, attempt
    raise TransportError(last_failure, attempts=max_attempts)

from dataclasses import asdict, dataclass

import specforge.global_config as gc
from specforge.utilities.errors import PreconditionError


@dataclass(frozen=True)
class ModelSetting:
    """How to reach one model and how to use its context.

    Attributes:
        setting_id (str): Label such as ``gpt-4o-new-context``, unique within a run.
        provider_endpoint (str): Chat completions URL.
        model_identifier (str): Model name sent to the provider.
        context_mode (str): ``same_context`` or ``new_context``.
        max_retries (int): Retries after the first attempt on transient failures.
        timeout (float): Request timeout in seconds, > 0.
        backoff_base (float): First retry delay in seconds.
        backoff_factor (float): Multiplier applied per retry.
        jitter (bool): Whether to randomize retry delays.
    """
    setting_id: str
    provider_endpoint: str
    model_identifier: str
    context_mode: str = gc.same_context
    max_retries: int = gc.LLM['max_retries']
    timeout: float = gc.LLM['timeout']
    backoff_base: float = gc.LLM['backoff_base']
    backoff_factor: float = gc.LLM['backoff_factor']
    jitter: bool = False

    def __post_init__(self):
        if not self.setting_id or not self.setting_id.strip():
            raise PreconditionError('A model setting needs a setting_id')
        if self.context_mode not in gc.context_modes:
            raise PreconditionError('Unknown context mode {!r}'.format(self.context_mode))
        if not self.timeout > 0:
            raise PreconditionError('Timeout of setting {} must be > 0'.format(self.setting_id))
        if int(self.max_retries) != self.max_retries or self.max_retries < 0:
            raise PreconditionError('max_retries of setting {} must be a non-negative integer'.format(
                self.setting_id))
        if self.backoff_base < 0 or self.backoff_factor < 1:
            raise PreconditionError('Invalid backoff for setting {}'.format(self.setting_id))

    def retry_delay(self, attempt):
        """Delay before retry number attempt + 1, without jitter."""
        return self.backoff_base * self.backoff_factor ** attempt

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data.setdefault('provider_endpoint', gc.LLM['endpoint'])
        known = cls.__dataclass_fields__.keys()
        unknown = set(data) - set(known)
        if unknown:
            raise PreconditionError('Unknown model setting keys: {}'.format(sorted(unknown)))
        return cls(**data)

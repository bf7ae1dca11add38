from __future__ import annotations

from hypothesis import HealthCheck, settings

settings.register_profile("czc", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("czc")

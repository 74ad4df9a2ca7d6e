from django.conf import settings


def pulse_setting(name, default):
    """Read a PULSE_* tunable from Django settings, falling back to ``default``."""
    return getattr(settings, name, default)

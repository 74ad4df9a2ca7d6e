from django.apps import AppConfig


class TimeenergyConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "timeenergy"

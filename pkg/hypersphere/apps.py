from django.apps import AppConfig


class HypersphereConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "hypersphere"

from django.apps import AppConfig


class CoreConfig(AppConfig):
    """Warp algebra: literals, operations and the expression language."""
    name = 'core'
    verbose_name = 'Warp algebra'

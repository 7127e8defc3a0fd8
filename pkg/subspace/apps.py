from django.apps import AppConfig


class SubspaceConfig(AppConfig):
    name = 'subspace'

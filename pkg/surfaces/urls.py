from django.urls import path

from .views import CoverView, FixtureDetailView, FixtureListView, RandomFixtureView

urlpatterns = [
    path("cover/", CoverView.as_view(), name="surface-cover"),
    path("fixtures/", FixtureListView.as_view(), name="fixture-list"),
    path("fixtures/random/", RandomFixtureView.as_view(), name="fixture-random"),
    path("fixtures/<str:name>/", FixtureDetailView.as_view(), name="fixture-detail"),
]

from django.urls import path

from .views import AnalyzeView, ReebView

urlpatterns = [
    path("analyze/", AnalyzeView.as_view(), name="analysis-analyze"),
    path("reeb/", ReebView.as_view(), name="analysis-reeb"),
]

from django.urls import path, include
from rest_framework.routers import DefaultRouter
from rest_framework_simplejwt.views import TokenObtainPairView, TokenRefreshView
from .views import BenchmarkSuiteViewSet, ProblemInstanceViewSet, SolveRunViewSet

router = DefaultRouter()
router.register(r'instances', ProblemInstanceViewSet, basename='instance')
router.register(r'runs', SolveRunViewSet, basename='run')
router.register(r'suites', BenchmarkSuiteViewSet, basename='suite')

urlpatterns = [
    # JWT Authentication
    path('token/', TokenObtainPairView.as_view(), name='token_obtain_pair'),
    path('token/refresh/', TokenRefreshView.as_view(), name='token_refresh'),

    # API endpoints
    path('', include(router.urls)),
]

"""Main API entry point - FastAPI application with route registration."""

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from routes import algebra_router, numerics_router
import config
import uvicorn


# Disable docs in production
docs_url = "/docs" if config.ENVIRONMENT == "development" else None
redoc_url = "/redoc" if config.ENVIRONMENT == "development" else None

app = FastAPI(
    title="q-Oscillator API",
    docs_url=docs_url,
    redoc_url=redoc_url
)

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Register routes
app.include_router(algebra_router)
app.include_router(numerics_router)


@app.get("/health")
async def health():
    return {"status": "ok", "environment": config.ENVIRONMENT}


if __name__ == "__main__":
    uvicorn.run(
        "api:app",
        host=config.API_HOST,
        port=config.API_PORT,
        reload=config.ENVIRONMENT == "development",
        reload_dirs=["."],
        reload_excludes=["tests/*", "docs/*", "__pycache__/*"],
    )

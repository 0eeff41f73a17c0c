#include "fpshield/fpd.h"

namespace fpshield::fpd {

namespace {

// Endpoint groups follow the usual fingerprinting techniques: multi-step
// techniques (canvas, audio, WebGL) only fire once a page both produces and
// reads back content; enumeration-style probes (fonts) need many calls.
// Weights and thresholds are project calibration, not published values.
constexpr std::string_view kShippedConfig = R"json({
  "schema": 1,
  "root": "fingerprinting",
  "severity": {"yellow": 0.25, "orange": 0.5},
  "groups": [
    {"name": "fingerprinting", "description": "Browser fingerprinting",
     "threshold": 8,
     "groups": [
       {"group": "canvas", "weight": 4},
       {"group": "webgl", "weight": 3},
       {"group": "audio", "weight": 4},
       {"group": "fonts", "weight": 4},
       {"group": "navigator", "weight": 2},
       {"group": "screen", "weight": 1},
       {"group": "devices", "weight": 3},
       {"group": "timezone", "weight": 1},
       {"group": "webrtc", "weight": 2}
     ]},
    {"name": "canvas", "description": "Canvas rendering read back",
     "threshold": 3,
     "endpoints": [
       {"endpoint": "HTMLCanvasElement.prototype.toDataURL", "weight": 2},
       {"endpoint": "HTMLCanvasElement.prototype.toBlob", "weight": 2},
       {"endpoint": "CanvasRenderingContext2D.prototype.getImageData", "weight": 2},
       {"endpoint": "OffscreenCanvas.prototype.convertToBlob", "weight": 2},
       {"endpoint": "CanvasRenderingContext2D.prototype.isPointInPath", "weight": 1},
       {"endpoint": "CanvasRenderingContext2D.prototype.fillText", "weight": 1},
       {"endpoint": "CanvasRenderingContext2D.prototype.strokeText", "weight": 1}
     ]},
    {"name": "webgl", "description": "WebGL renderer and capability probing",
     "threshold": 3,
     "endpoints": [
       {"endpoint": "WebGLRenderingContext.prototype.getParameter", "min_calls": 5, "weight": 1},
       {"endpoint": "WebGL2RenderingContext.prototype.getParameter", "min_calls": 5, "weight": 1},
       {"endpoint": "WebGLRenderingContext.prototype.getExtension", "min_calls": 3, "weight": 1},
       {"endpoint": "WebGLRenderingContext.prototype.getSupportedExtensions", "weight": 1},
       {"endpoint": "WebGLRenderingContext.prototype.getShaderPrecisionFormat", "min_calls": 3, "weight": 1},
       {"endpoint": "WebGLRenderingContext.prototype.readPixels", "weight": 2}
     ]},
    {"name": "audio", "description": "Audio processing read back",
     "threshold": 3,
     "endpoints": [
       {"endpoint": "BaseAudioContext.prototype.createOscillator", "weight": 1},
       {"endpoint": "BaseAudioContext.prototype.createDynamicsCompressor", "weight": 1},
       {"endpoint": "OfflineAudioContext.prototype.startRendering", "weight": 1},
       {"endpoint": "AudioBuffer.prototype.getChannelData", "weight": 2},
       {"endpoint": "AudioBuffer.prototype.copyFromChannel", "weight": 2},
       {"endpoint": "AnalyserNode.prototype.getFloatFrequencyData", "weight": 2},
       {"endpoint": "AnalyserNode.prototype.getByteFrequencyData", "weight": 2}
     ]},
    {"name": "fonts", "description": "Font enumeration",
     "threshold": 2,
     "endpoints": [
       {"endpoint": "CanvasRenderingContext2D.prototype.measureText", "min_calls": 20, "weight": 2},
       {"endpoint": "HTMLElement.prototype.offsetWidth", "min_calls": 50, "weight": 2},
       {"endpoint": "HTMLElement.prototype.offsetHeight", "min_calls": 50, "weight": 2},
       {"endpoint": "FontFaceSet.prototype.check", "min_calls": 10, "weight": 2}
     ]},
    {"name": "navigator", "description": "Browser and hardware properties",
     "threshold": 6,
     "endpoints": [
       {"endpoint": "navigator.userAgent", "weight": 1},
       {"endpoint": "navigator.appVersion", "weight": 1},
       {"endpoint": "navigator.platform", "weight": 1},
       {"endpoint": "navigator.language", "weight": 1},
       {"endpoint": "navigator.languages", "weight": 1},
       {"endpoint": "navigator.hardwareConcurrency", "weight": 1},
       {"endpoint": "navigator.deviceMemory", "weight": 1},
       {"endpoint": "navigator.plugins", "weight": 1},
       {"endpoint": "navigator.mimeTypes", "weight": 1},
       {"endpoint": "navigator.doNotTrack", "weight": 1},
       {"endpoint": "navigator.cookieEnabled", "weight": 1},
       {"endpoint": "navigator.maxTouchPoints", "weight": 1},
       {"endpoint": "navigator.vendor", "weight": 1},
       {"endpoint": "navigator.oscpu", "weight": 1},
       {"endpoint": "navigator.productSub", "weight": 1}
     ]},
    {"name": "screen", "description": "Screen geometry",
     "threshold": 4,
     "endpoints": [
       {"endpoint": "screen.width", "weight": 1},
       {"endpoint": "screen.height", "weight": 1},
       {"endpoint": "screen.availWidth", "weight": 1},
       {"endpoint": "screen.availHeight", "weight": 1},
       {"endpoint": "screen.colorDepth", "weight": 1},
       {"endpoint": "screen.pixelDepth", "weight": 1},
       {"endpoint": "window.devicePixelRatio", "weight": 1}
     ]},
    {"name": "devices", "description": "Attached devices and device state",
     "threshold": 2,
     "endpoints": [
       {"endpoint": "MediaDevices.prototype.enumerateDevices", "weight": 1},
       {"endpoint": "navigator.getBattery", "weight": 1},
       {"endpoint": "navigator.getGamepads", "weight": 1},
       {"endpoint": "navigator.connection", "weight": 1},
       {"endpoint": "Permissions.prototype.query", "min_calls": 3, "weight": 1}
     ]},
    {"name": "timezone", "description": "Time zone and locale",
     "threshold": 2,
     "endpoints": [
       {"endpoint": "Date.prototype.getTimezoneOffset", "weight": 1},
       {"endpoint": "Intl.DateTimeFormat.prototype.resolvedOptions", "weight": 1}
     ]},
    {"name": "webrtc", "description": "WebRTC local address discovery",
     "threshold": 2,
     "endpoints": [
       {"endpoint": "RTCPeerConnection.prototype.createDataChannel", "weight": 1},
       {"endpoint": "RTCPeerConnection.prototype.createOffer", "weight": 1},
       {"endpoint": "RTCPeerConnection.prototype.setLocalDescription", "weight": 1}
     ]}
  ]
})json";

}  // namespace

std::string_view FpdConfig::shipped_document() { return kShippedConfig; }

}  // namespace fpshield::fpd

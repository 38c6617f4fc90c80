#pragma once

// HTTP+JSON routes for SelectionService (cpp-httplib, nlohmann/json).
//
//   POST /sessions                  multipart field "image" (or raw image body) -> {session_id, width, height, image_id}
//   GET  /sessions/{id}             session state
//   GET  /sessions/{id}/saliency.png
//   GET  /sessions/{id}/mask.png    0/255 PNG
//   POST /sessions/{id}/click       {x,y} -> {node_id, outline, mask_pixels}
//   POST /sessions/{id}/grow
//   POST /sessions/{id}/shrink      {x,y}
//   POST /sessions/{id}/add         {x,y}
//   POST /sessions/{id}/subtract    {x,y}
//   POST /sessions/{id}/reset
//   POST /sessions/{id}/delete
//   POST /sessions/{id}/grasp-point {x,y} -> GraspRequest summary, 409 when outside the mask
//
// Errors are {"error": "..."} with 400 (bad input), 404 (unknown session) or 409 (state conflict).

#include <pats/selection_service.hpp>

#include <httplib.h>
#include <json.hpp>

#include <functional>
#include <string>

namespace pats {

namespace detail {

using json = nlohmann::json;

inline json outline_json(const std::vector<Polygon>& polys)
{
    json out = json::array();
    for (const auto& poly : polys) {
        json p = json::array();
        for (const Pixel& v : poly) p.push_back({v.x, v.y});
        out.push_back(std::move(p));
    }
    return out;
}

inline json selection_json(const SelectionSession& s)
{
    json j;
    j["active_node"] = s.active_node() ? json(*s.active_node()) : json(nullptr);
    j["additive"] = s.additive_nodes();
    j["subtractive"] = s.subtractive_nodes();
    j["mask_pixels"] = count_foreground(s.mask());
    j["outline"] = outline_json(s.outline());
    return j;
}

inline Pixel pixel_from_body(const httplib::Request& req)
{
    json body;
    try {
        body = json::parse(req.body);
    } catch (const json::parse_error&) {
        throw std::invalid_argument("request body must be JSON {\"x\":..,\"y\":..}");
    }
    if (!body.is_object() || !body.contains("x") || !body.contains("y") || !body["x"].is_number_integer() ||
        !body["y"].is_number_integer()) {
        throw std::invalid_argument("request body must contain integer fields x and y");
    }
    return {body["x"].get<int>(), body["y"].get<int>()};
}

inline void reply(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

} // namespace detail

/// Registers all session routes on `server`; `service` must outlive it.
inline void install_routes(httplib::Server& server, SelectionService& service)
{
    using detail::json;
    using detail::reply;
    using Handler = std::function<void(SelectionService::Handle&, const httplib::Request&, httplib::Response&)>;

    // Runs `fn` under the session lock and maps exceptions to status codes.
    auto guarded = [&service](const Handler& fn) {
        return [&service, fn](const httplib::Request& req, httplib::Response& res) {
            try {
                auto handle = service.find(req.matches[1]);
                std::lock_guard lock(handle->mutex);
                fn(*handle, req, res);
            } catch (const SessionNotFound& e) {
                reply(res, 404, {{"error", e.what()}});
            } catch (const SelectionError& e) {
                reply(res, 409, {{"error", e.what()}});
            } catch (const std::out_of_range& e) {
                reply(res, 400, {{"error", e.what()}});
            } catch (const std::invalid_argument& e) {
                reply(res, 400, {{"error", e.what()}});
            }
        };
    };

    server.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
        std::string bytes;
        if (req.has_file("image")) {
            bytes = req.get_file_value("image").content;
        } else {
            bytes = req.body;
        }
        if (bytes.empty()) {
            reply(res, 400, {{"error", "missing image upload (multipart field 'image' or raw body)"}});
            return;
        }
        try {
            auto opened = service.open_session(bytes);
            const auto& seg = opened.handle->session.segmentation();
            reply(res, 200,
                  {{"session_id", opened.session_id},
                   {"image_id", opened.handle->session.image_id()},
                   {"width", seg.width()},
                   {"height", seg.height()},
                   {"nodes", seg.tree.node_count()}});
        } catch (const ImageDecodeError& e) {
            reply(res, 400, {{"error", e.what()}});
        }
    });

    const std::string id = R"(/sessions/([0-9a-f]+))";

    server.Get(id, guarded([](auto& h, const auto&, auto& res) {
        json j = detail::selection_json(h.session);
        j["image_id"] = h.session.image_id();
        j["width"] = h.session.segmentation().width();
        j["height"] = h.session.segmentation().height();
        if (auto g = h.session.grasp_point()) j["grasp_point"] = {{"x", g->x}, {"y", g->y}};
        reply(res, 200, j);
    }));

    server.Get(id + "/saliency.png", guarded([](auto& h, const auto&, auto& res) {
        res.set_content(encode_png(h.session.segmentation().rendered), "image/png");
    }));

    server.Get(id + "/mask.png", guarded([](auto& h, const auto&, auto& res) {
        res.set_content(encode_png(mask_to_gray(h.session.mask())), "image/png");
    }));

    server.Post(id + "/click", guarded([](auto& h, const auto& req, auto& res) {
        const NodeId node = h.session.click_select(detail::pixel_from_body(req));
        json j = detail::selection_json(h.session);
        j["node_id"] = node;
        reply(res, 200, j);
    }));

    server.Post(id + "/grow", guarded([](auto& h, const auto&, auto& res) {
        const StepResult r = h.session.grow();
        json j = detail::selection_json(h.session);
        j["node_id"] = r.node;
        j["noop"] = r.noop;
        reply(res, 200, j);
    }));

    server.Post(id + "/shrink", guarded([](auto& h, const auto& req, auto& res) {
        const StepResult r = h.session.shrink(detail::pixel_from_body(req));
        json j = detail::selection_json(h.session);
        j["node_id"] = r.node;
        j["noop"] = r.noop;
        reply(res, 200, j);
    }));

    server.Post(id + "/add", guarded([](auto& h, const auto& req, auto& res) {
        const NodeId part = h.session.add_part(detail::pixel_from_body(req));
        json j = detail::selection_json(h.session);
        j["node_id"] = part;
        reply(res, 200, j);
    }));

    server.Post(id + "/subtract", guarded([](auto& h, const auto& req, auto& res) {
        const NodeId part = h.session.subtract_part(detail::pixel_from_body(req));
        json j = detail::selection_json(h.session);
        j["node_id"] = part;
        reply(res, 200, j);
    }));

    server.Post(id + "/reset", guarded([](auto& h, const auto&, auto& res) {
        h.session.reset();
        reply(res, 200, {{"ok", true}});
    }));

    server.Post(id + "/delete", guarded([](auto& h, const auto&, auto& res) {
        h.session.delete_selection();
        reply(res, 200, {{"ok", true}});
    }));

    server.Post(id + "/grasp-point", guarded([](auto& h, const auto& req, auto& res) {
        const GraspRequest gr = h.session.confirm_grasp_point(detail::pixel_from_body(req));
        int x0 = gr.mask.width(), y0 = gr.mask.height(), x1 = -1, y1 = -1;
        for (int y = 0; y < gr.mask.height(); ++y) {
            for (int x = 0; x < gr.mask.width(); ++x) {
                if (!gr.mask(x, y)) continue;
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
        }
        reply(res, 200,
              {{"image_id", gr.image_id},
               {"x", gr.point.x},
               {"y", gr.point.y},
               {"mask_pixels", count_foreground(gr.mask)},
               {"mask_bbox", {x0, y0, x1, y1}}});
    }));
}

} // namespace pats

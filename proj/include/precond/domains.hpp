// Built-in domain packs: the Restaurants and Buses dialog domains and the
// household textworld, with ground-truth preconditions attached for
// evaluation. Also houses the scripted demonstration generators and the
// minimal household simulator used for success-rate evaluation.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "precond/exec.hpp"
#include "precond/rng.hpp"
#include "precond/schema.hpp"
#include "precond/trajectory.hpp"

namespace precond {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Schema builders

namespace detail {

struct SchemaBuilder {
    DomainSchema s;

    SchemaBuilder(std::string name) { s.name = std::move(name); }

    SchemaBuilder& var(std::string name, StateVarKind kind, std::string prefix) {
        s.state_vars.push_back({std::move(name), kind, std::move(prefix)});
        return *this;
    }
    SchemaBuilder& vocab(std::string id, std::vector<std::string> words) {
        s.vocabularies[std::move(id)] = std::move(words);
        return *this;
    }
    FunctionDecl& fn(std::string name, FunctionKind kind) {
        FunctionDecl f;
        f.name = std::move(name);
        f.kind = kind;
        s.functions.push_back(std::move(f));
        return s.functions.back();
    }
    FunctionDecl& obs(std::string name) { return fn(std::move(name), FunctionKind::Observation); }
    FunctionDecl& action(std::string name, std::string gt) {
        FunctionDecl& f = fn(std::move(name), FunctionKind::Action);
        f.gt_precondition_text = std::move(gt);
        return f;
    }

    DomainSchema finish() {
        validate_schema(s);
        for (auto& f : s.functions) {
            if (f.gt_precondition_text.empty()) continue;
            f.gt_precondition = parse_expr(f.gt_precondition_text, s, f);
        }
        return std::move(s);
    }
};

inline ParamDecl param(std::string name, std::string vocab, bool variadic = false) {
    return {std::move(name), std::move(vocab), variadic};
}

inline EffectRule set_flag(std::string target, bool value) {
    EffectRule e;
    e.target = std::move(target);
    e.op = value ? EffectOp::SetTrue : EffectOp::SetFalse;
    return e;
}

inline EffectRule set_map_true(std::string target, std::string key_param) {
    EffectRule e;
    e.target = std::move(target);
    e.op = EffectOp::SetTrue;
    e.key.push_back({false, std::move(key_param)});
    return e;
}

// Shared observation inventory of the SGD-style dialog domains: the eleven
// user acts plus the system's query status report.
inline void add_dialog_observations(SchemaBuilder& b) {
    auto& inform_intent = b.obs("user.INFORM_INTENT");
    inform_intent.params = {param("intent", "intents")};
    inform_intent.effects = {set_map_true("informed_intent", "intent")};

    b.obs("user.NEGATE_INTENT").effects = {set_flag("negate_intent", true)};
    b.obs("user.AFFIRM_INTENT").effects = {set_flag("affirm_intent", true)};
    b.obs("user.REQUEST_ALTS").effects = {set_flag("request_alternatives", true)};

    auto& inform = b.obs("user.INFORM");
    inform.params = {param("slot", "slots")};
    inform.effects = {set_map_true("informed_slot", "slot")};

    auto& request = b.obs("user.REQUEST");
    request.params = {param("slot", "slots")};
    request.effects = {set_map_true("requested_slot", "slot")};

    b.obs("user.GOODBYE").effects = {set_flag("no_more", true)};
    b.obs("user.THANK_YOU").effects = {set_flag("no_more", true)};
    b.obs("user.SELECT").effects = {set_flag("selected", true)};
    b.obs("user.AFFIRM").effects = {set_flag("affirmed", true)};
    b.obs("user.NEGATE").effects = {set_flag("affirmed", false)};

    auto& query = b.obs("system.set_query_status");
    query.params = {param("status", "bools")};
    EffectRule e;
    e.target = "query_success";
    e.op = EffectOp::SetValue;
    e.value = EffectTerm{false, "status"};
    query.effects = {e};
}

inline void add_dialog_state(SchemaBuilder& b) {
    b.var("informed_intent", StateVarKind::BoolMap, "self.user.")
        .var("informed_slot", StateVarKind::BoolMap, "self.user.")
        .var("requested_slot", StateVarKind::BoolMap, "self.user.")
        .var("no_more", StateVarKind::BoolFlag, "self.user.")
        .var("selected", StateVarKind::BoolFlag, "self.user.")
        .var("affirmed", StateVarKind::BoolFlag, "self.user.")
        .var("affirm_intent", StateVarKind::BoolFlag, "self.user.")
        .var("negate_intent", StateVarKind::BoolFlag, "self.user.")
        .var("request_alternatives", StateVarKind::BoolFlag, "self.user.")
        .var("query_success", StateVarKind::TriState, "self.");
}

}  // namespace detail

inline DomainSchema restaurants_schema() {
    detail::SchemaBuilder b("restaurants");
    detail::add_dialog_state(b);
    b.vocab("slots", {"city", "cuisine", "time", "party_size", "date", "restaurant_name",
                      "has_live_music", "serves_alcohol", "price_range"})
        .vocab("intents", {"FindRestaurants", "ReserveRestaurant"})
        .vocab("bools", {"True", "False"});
    detail::add_dialog_observations(b);

    b.action("system.INFORM", "requested_slot[slot]").params = {detail::param("slot", "slots")};
    b.action("system.REQUEST", "not informed_slot[slot]").params = {detail::param("slot", "slots")};
    b.action("system.GOODBYE", "no_more");
    b.action("system.FindRestaurants",
             "informed_slot['city'] and informed_slot['cuisine'] and "
             "informed_intent['FindRestaurants']");
    b.action("system.ReserveRestaurant", "selected or affirmed");
    b.action("system.OFFER", "query_success == true or affirmed").params = {
        detail::param("slot", "slots")};
    b.action("system.INFORM_COUNT", "query_success == true");
    b.action("system.OFFER_INTENT", "selected").params = {detail::param("intent", "intents")};
    b.action("system.CONFIRM",
             "informed_slot['time'] and informed_slot['city'] and "
             "(selected or informed_slot['restaurant_name'])")
        .params = {detail::param("slot", "slots")};
    b.action("system.NOTIFY_SUCCESS", "query_success == true");
    b.action("system.NOTIFY_FAILURE", "not query_success == true");
    b.action("system.REQ_MORE", "selected or no_more or not query_success == true");
    return b.finish();
}

inline DomainSchema buses_schema() {
    detail::SchemaBuilder b("buses");
    detail::add_dialog_state(b);
    b.vocab("slots", {"from_location", "to_location", "leaving_date", "leaving_time",
                      "travelers", "fare", "transfers", "fare_type"})
        .vocab("intents", {"FindBus", "BuyBusTicket"})
        .vocab("bools", {"True", "False"});
    detail::add_dialog_observations(b);

    b.action("system.INFORM", "requested_slot[slot]").params = {detail::param("slot", "slots")};
    b.action("system.REQUEST", "not informed_slot[slot]").params = {detail::param("slot", "slots")};
    b.action("system.GOODBYE", "no_more");
    b.action("system.OFFER", "query_success == true").params = {detail::param("slot", "slots")};
    b.action("system.INFORM_COUNT", "query_success == true");
    b.action("system.OFFER_INTENT", "selected").params = {detail::param("intent", "intents")};
    b.action("system.CONFIRM",
             "informed_slot['to_location'] and informed_slot['from_location'] and "
             "informed_slot['leaving_date'] and informed_slot['travelers']")
        .params = {detail::param("slot", "slots")};
    b.action("system.NOTIFY_SUCCESS", "query_success == true");
    b.action("system.REQ_MORE", "selected or no_more");
    b.action("system.FindBus",
             "informed_slot['to_location'] and informed_slot['from_location'] and "
             "informed_slot['leaving_date']");
    b.action("system.BuyBusTicket", "affirmed");
    return b.finish();
}

inline DomainSchema household_schema() {
    detail::SchemaBuilder b("household");
    b.var("object_states", StateVarKind::PropMap, "self.env.")
        .var("inventory", StateVarKind::OptString, "self.")
        .var("visible_objects", StateVarKind::StringSet, "self.");

    const std::vector<std::string> objects = {
        "spraybottle 1", "cloth 1",  "soapbottle 1", "toiletpaper 1", "sink 1", "candle 1",
        "candle 2",      "mug 1",    "apple 1",      "desklamp 1",    "book 1"};
    const std::vector<std::string> receptacles = {
        "countertop 1", "drawer 1",          "drawer 2",      "drawer 3",      "drawer 4",
        "drawer 5",     "drawer 6",          "garbagecan 1",  "handtowelholder 1",
        "handtowelholder 2", "sinkbasin 1",  "toilet 1",      "toiletpaperhanger 1",
        "towelholder 1", "towelholder 2",    "microwave 1",   "fridge 1",      "shelf 1",
        "desk 1"};
    std::vector<std::string> things = objects;
    things.insert(things.end(), receptacles.begin(), receptacles.end());

    b.vocab("objects", objects)
        .vocab("receptacles", receptacles)
        .vocab("things", things)
        .vocab("properties", {"open", "clean", "hot", "cool", "on"})
        .vocab("bools", {"True", "False"})
        .vocab("recep_types", {"sink", "microwave", "fridge"});

    auto& add_inv = b.obs("agent.add_inventory");
    add_inv.params = {detail::param("obj", "objects")};
    {
        EffectRule e;
        e.target = "inventory";
        e.op = EffectOp::SetValue;
        e.value = EffectTerm{false, "obj"};
        add_inv.effects = {e};
    }
    auto& rm_inv = b.obs("agent.remove_inventory");
    rm_inv.params = {detail::param("obj", "objects")};
    {
        EffectRule e;
        e.target = "inventory";
        e.op = EffectOp::Clear;
        rm_inv.effects = {e};
    }
    auto& upd = b.obs("agent.update_visible_objects");
    upd.params = {detail::param("args", "things", /*variadic=*/true)};
    {
        EffectRule e;
        e.target = "visible_objects";
        e.op = EffectOp::Insert;
        e.args = {{false, "*"}};
        upd.effects = {e};
    }
    auto& setp = b.obs("env.set_property");
    setp.params = {detail::param("obj", "things"), detail::param("property", "properties"),
                   detail::param("value", "bools")};
    {
        EffectRule e;
        e.target = "object_states";
        e.op = EffectOp::SetValue;
        e.key = {{false, "obj"}, {false, "property"}};
        e.value = EffectTerm{false, "value"};
        setp.effects = {e};
    }

    b.action("agent.goto", "recep in visible_objects").params = {
        detail::param("recep", "receptacles")};
    b.action("agent.open",
             "recep in visible_objects and not object_states[(recep, 'open')]")
        .params = {detail::param("recep", "receptacles")};
    b.action("agent.close", "recep in visible_objects and object_states[(recep, 'open')]")
        .params = {detail::param("recep", "receptacles")};
    b.action("agent.take",
             "obj in visible_objects and recep in visible_objects and inventory == none")
        .params = {detail::param("obj", "objects"), detail::param("recep", "receptacles")};
    b.action("agent.put", "inventory == obj and recep in visible_objects").params = {
        detail::param("obj", "objects"), detail::param("recep", "receptacles")};
    b.action("agent.clean",
             "recep in visible_objects and inventory == obj and 'sink' in recep")
        .params = {detail::param("obj", "objects"), detail::param("recep", "receptacles")};
    b.action("agent.heat",
             "recep in visible_objects and inventory == obj and 'microwave' in recep")
        .params = {detail::param("obj", "objects"), detail::param("recep", "receptacles")};
    b.action("agent.cool",
             "recep in visible_objects and inventory == obj and 'fridge' in recep")
        .params = {detail::param("obj", "objects"), detail::param("recep", "receptacles")};
    b.action("agent.toggle", "obj in visible_objects").params = {
        detail::param("obj", "objects")};
    return b.finish();
}

inline std::vector<DomainSchema> builtin_schemas() {
    return {restaurants_schema(), buses_schema(), household_schema()};
}

inline DomainSchema builtin_schema(const std::string& name) {
    if (name == "restaurants") return restaurants_schema();
    if (name == "buses") return buses_schema();
    if (name == "household") return household_schema();
    throw SchemaError("unknown built-in domain '" + name + "'");
}

// ---------------------------------------------------------------------------
// Scripted dialog demonstrations

// A scenario drives the scripted user/system pair through one dialog. The
// branch knobs exist to exercise every ground-truth boundary somewhere in a
// ten-scenario window: acting after the user already said thanks, requests
// before and after queries, failures at each stage, selection without
// affirmation, and every slot bound somewhere. Without that coverage, mining
// absorbs accidental co-occurrences of the data into the preconditions.
struct DialogScenario {
    std::vector<std::string> intents;       // performed in order
    std::vector<std::string> slot_order;    // informable slots for the search intent
    bool request_alts = false;
    bool alts_after_info = false;           // ask for alternatives after info requests
    bool negate_then_affirm = false;        // reject first confirmation round
    bool query_failure = false;             // first query fails
    bool give_up_on_failure = false;        // failure ends the dialog
    bool pre_query_failure = false;         // service failure before any query ran
    bool booking_failure = false;           // transaction query fails once, then retried
    bool mid_thanks = false;                // user thanks before the dialog is over
    bool refine_search = false;             // re-query after a successful query
    bool refine_fails = false;              // the refined query fails first
    bool post_transact_search = false;      // new search after the transaction
    bool post_affirm_revision = false;      // user amends a slot after affirming
    bool search_request_first = false;      // system opens the dialog with a request
    bool use_select = true;                 // user selects an offered item
    bool use_affirm = true;                 // user affirms the confirmation round
    bool offer_intent = false;              // system proposes the transact intent
    bool decline_intent = false;            // user declines the proposed intent
    bool offer_search_on_failure = false;   // propose a new search when booking fails
    bool post_select_intent_offer = false;  // propose more searching right after SELECT
    bool req_more = false;                  // closing "anything else?"
    bool inform_count = true;
    std::optional<std::string> early_info_slot;        // answered before any query
    std::optional<std::string> recovery_request_slot;  // requested after a failed query
    std::optional<std::string> failure_info_slot;      // answered inside the failure window
    std::optional<std::string> post_transact_info_slot;
    std::optional<std::string> booking_recovery_slot;  // requested after a failed booking
    std::vector<std::string> info_requests;   // user asks, system answers, in order
    std::vector<std::string> transact_slots;  // overrides the playbook's list when set
    std::vector<std::string> offer_slots;     // overrides the playbook's list when set
    std::vector<std::string> during_transact_offers;  // offers while committed, no query
};

namespace detail {

// Static description of one dialog domain for the scripted expert.
struct DialogPlaybook {
    std::string search_intent;
    std::string search_fn;     // system query action for the search intent
    std::string transact_intent;
    std::string transact_fn;   // system query action for the transaction
    std::vector<std::string> search_slots;    // default informable order
    std::vector<std::string> transact_slots;  // requested before confirmation
    std::vector<std::string> direct_slots;    // requested in transact-only dialogs
    std::vector<std::string> direct_post_slots;  // requested after the direct search
    std::vector<std::string> offer_slots;
    std::vector<std::string> confirm_slots;
    std::vector<std::string> info_slots;
    bool has_notify_failure = false;
    bool direct_runs_search = false;  // transact-only dialogs still run the search query
};

inline DialogPlaybook restaurants_playbook() {
    DialogPlaybook p;
    p.search_intent = "FindRestaurants";
    p.search_fn = "system.FindRestaurants";
    p.transact_intent = "ReserveRestaurant";
    p.transact_fn = "system.ReserveRestaurant";
    p.search_slots = {"city", "cuisine"};
    p.transact_slots = {"time"};
    p.direct_slots = {"restaurant_name", "city", "time"};
    p.offer_slots = {"restaurant_name", "city"};
    p.confirm_slots = {"restaurant_name", "city", "time"};
    p.info_slots = {"has_live_music", "serves_alcohol", "price_range"};
    p.has_notify_failure = true;
    return p;
}

inline DialogPlaybook buses_playbook() {
    DialogPlaybook p;
    p.search_intent = "FindBus";
    p.search_fn = "system.FindBus";
    p.transact_intent = "BuyBusTicket";
    p.transact_fn = "system.BuyBusTicket";
    p.search_slots = {"from_location", "to_location", "leaving_date"};
    p.transact_slots = {"travelers"};
    p.direct_slots = {"from_location", "to_location", "leaving_date"};
    p.direct_post_slots = {"travelers"};
    p.offer_slots = {"leaving_time", "fare"};
    p.confirm_slots = {"from_location", "to_location", "leaving_date", "travelers"};
    p.info_slots = {"transfers", "fare_type"};
    p.direct_runs_search = true;
    return p;
}

inline const DialogPlaybook& playbook_for(const DomainSchema& schema) {
    static const DialogPlaybook restaurants = restaurants_playbook();
    static const DialogPlaybook buses = buses_playbook();
    if (schema.name == "restaurants") return restaurants;
    if (schema.name == "buses") return buses;
    throw GenerationError("no dialog playbook for domain '" + schema.name + "'");
}

// Emits calls while tracking state, refusing any system action whose
// ground-truth precondition does not hold. Keeps generated demonstrations
// expert by construction.
struct DialogWriter {
    const DomainSchema& schema;
    Trajectory traj;
    State state;

    DialogWriter(const DomainSchema& s, std::string id) : schema(s), state(initial_state(s)) {
        traj.id = std::move(id);
    }

    void emit(const std::string& fn_name, std::vector<std::string> args = {}) {
        const auto* fn = schema.find_function(fn_name);
        if (!fn) throw GenerationError("unknown function '" + fn_name + "'");
        Call call{fn_name, std::move(args)};
        check_call(schema, call, "generate:" + traj.id);
        if (fn->is_action() && fn->gt_precondition) {
            BindingView binding{fn, &call.args};
            if (!eval_expr(*fn->gt_precondition, state, binding))
                throw GenerationError("infeasible scenario for '" + traj.id +
                                      "': gt precondition of " + fn_name + " violated: " +
                                      fn->gt_precondition_text);
        }
        if (!fn->is_action())
            for (const auto& rule : fn->effects)
                apply_effect(state, rule, *fn, call, schema);
        traj.calls.push_back(std::move(call));
    }

    bool informed(const std::string& slot) const {
        auto it = state.bool_maps.at("informed_slot").find(slot);
        return it != state.bool_maps.at("informed_slot").end() && it->second;
    }

    // Some acts are only plausible on certain branches; emit them when legal.
    bool emit_if_legal(const std::string& fn_name, std::vector<std::string> args = {}) {
        const auto* fn = schema.find_function(fn_name);
        if (fn && fn->is_action() && fn->gt_precondition) {
            BindingView binding{fn, &args};
            if (!eval_expr(*fn->gt_precondition, state, binding)) return false;
        }
        emit(fn_name, std::move(args));
        return true;
    }
};

inline void run_dialog_scenario(DialogWriter& w, const DialogPlaybook& p,
                                const DialogScenario& sc) {
    const bool transact_only =
        sc.intents.size() == 1 && sc.intents.front() == p.transact_intent;
    const bool do_transact =
        std::find(sc.intents.begin(), sc.intents.end(), p.transact_intent) != sc.intents.end();
    const auto& transact_slots = sc.transact_slots.empty() ? p.transact_slots : sc.transact_slots;
    const auto& offer_slots = sc.offer_slots.empty() ? p.offer_slots : sc.offer_slots;

    const auto request_and_inform = [&](const std::string& slot) {
        if (w.informed(slot)) return;
        w.emit("system.REQUEST", {slot});
        w.emit("user.INFORM", {slot});
    };
    const auto offers = [&] {
        for (const auto& s : offer_slots) w.emit("system.OFFER", {s});
    };
    const auto info_pair = [&](const std::string& s) {
        w.emit("user.REQUEST", {s});
        w.emit("system.INFORM", {s});
    };
    const auto closing = [&] {
        bool asked = sc.req_more ? w.emit_if_legal("system.REQ_MORE") : true;
        if (!sc.mid_thanks) w.emit("user.THANK_YOU");
        if (sc.req_more && !asked) w.emit_if_legal("system.REQ_MORE");
        w.emit("user.GOODBYE");
        w.emit("system.GOODBYE");
    };
    const auto run_query = [&](bool fails_first) {
        w.emit(p.search_fn);
        if (fails_first) {
            w.emit("system.set_query_status", {"False"});
            if (p.has_notify_failure) w.emit("system.NOTIFY_FAILURE");
            if (sc.failure_info_slot) info_pair(*sc.failure_info_slot);
            if (sc.recovery_request_slot && !w.informed(*sc.recovery_request_slot)) {
                w.emit("system.REQUEST", {*sc.recovery_request_slot});
                w.emit("user.INFORM", {*sc.recovery_request_slot});
            } else {
                w.emit("user.INFORM", {sc.slot_order.back()});
            }
            w.emit(p.search_fn);
        }
        w.emit("system.set_query_status", {"True"});
    };

    if (sc.pre_query_failure && p.has_notify_failure && !transact_only) {
        // The service announces it cannot handle requests; the user persists.
        w.emit("system.NOTIFY_FAILURE");
        w.emit("user.INFORM_INTENT", {p.search_intent});
        if (sc.early_info_slot) info_pair(*sc.early_info_slot);
        for (const auto& slot : sc.slot_order) request_and_inform(slot);
        run_query(sc.query_failure);
        offers();
        if (sc.inform_count) w.emit("system.INFORM_COUNT");
        closing();
        return;
    }

    if (transact_only) {
        // Transaction without a preceding search; the user identifies the
        // item themselves.
        w.emit("user.INFORM_INTENT", {p.transact_intent});
        if (sc.pre_query_failure && p.has_notify_failure) w.emit("system.NOTIFY_FAILURE");
        for (const auto& slot : p.direct_slots) request_and_inform(slot);
        if (p.direct_runs_search) {
            // look the item up before asking for the remaining booking details
            w.emit(p.search_fn);
            w.emit("system.set_query_status", {"True"});
            if (sc.inform_count) w.emit("system.INFORM_COUNT");
            for (const auto& s : sc.during_transact_offers)
                w.emit_if_legal("system.OFFER", {s});
        }
        for (const auto& slot : p.direct_post_slots) request_and_inform(slot);
        for (const auto& slot : p.confirm_slots)
            if (w.informed(slot)) w.emit("system.CONFIRM", {slot});
        if (sc.negate_then_affirm) {
            w.emit("user.NEGATE");
            w.emit("user.INFORM", {p.direct_slots.back()});
            for (const auto& slot : p.confirm_slots)
                if (w.informed(slot)) w.emit("system.CONFIRM", {slot});
        }
        w.emit("user.AFFIRM");
        // Suggestions while the user is committed but no query has run yet.
        for (const auto& s : sc.during_transact_offers)
            w.emit_if_legal("system.OFFER", {s});
        if (sc.booking_failure) {
            w.emit(p.transact_fn);
            w.emit("system.set_query_status", {"False"});
            if (p.has_notify_failure) w.emit("system.NOTIFY_FAILURE");
            // alternatives proposed while the booking is failed
            for (const auto& s : sc.during_transact_offers)
                w.emit_if_legal("system.OFFER", {s});
            if (sc.booking_recovery_slot && !w.informed(*sc.booking_recovery_slot)) {
                w.emit("system.REQUEST", {*sc.booking_recovery_slot});
                w.emit("user.INFORM", {*sc.booking_recovery_slot});
                w.emit("system.CONFIRM", {*sc.booking_recovery_slot});
                w.emit("user.AFFIRM");
            }
        }
        w.emit(p.transact_fn);
        w.emit("system.set_query_status", {"True"});
        w.emit("system.NOTIFY_SUCCESS");
        if (sc.booking_failure && p.direct_runs_search) {
            // look up the return trip as a follow-up
            w.emit(p.search_fn);
            w.emit("system.set_query_status", {"True"});
            for (const auto& s : sc.during_transact_offers) {
                w.emit_if_legal("system.OFFER", {s});
                break;
            }
        }
        closing();
        return;
    }

    if (sc.search_request_first) w.emit("system.REQUEST", {sc.slot_order.front()});
    w.emit("user.INFORM_INTENT", {p.search_intent});
    if (sc.early_info_slot) info_pair(*sc.early_info_slot);
    for (const auto& slot : sc.slot_order) request_and_inform(slot);

    if (sc.query_failure && sc.give_up_on_failure) {
        w.emit(p.search_fn);
        w.emit("system.set_query_status", {"False"});
        if (p.has_notify_failure) w.emit("system.NOTIFY_FAILURE");
        if (!sc.mid_thanks) w.emit("user.THANK_YOU");
        if (sc.req_more) w.emit_if_legal("system.REQ_MORE");
        w.emit("user.GOODBYE");
        w.emit("system.GOODBYE");
        return;
    }
    run_query(sc.query_failure);
    offers();
    if (sc.inform_count) w.emit("system.INFORM_COUNT");
    if (sc.request_alts && !sc.alts_after_info) {
        w.emit("user.REQUEST_ALTS");
        offers();
    }
    if (sc.mid_thanks) w.emit("user.THANK_YOU");
    for (const auto& s : sc.info_requests) info_pair(s);
    if (sc.request_alts && sc.alts_after_info) {
        w.emit("user.REQUEST_ALTS");
        offers();
    }
    if (sc.refine_search) {
        w.emit("user.INFORM", {sc.slot_order.front()});
        if (sc.refine_fails) {
            w.emit(p.search_fn);
            w.emit("system.set_query_status", {"False"});
            if (p.has_notify_failure) w.emit("system.NOTIFY_FAILURE");
            w.emit("user.INFORM", {sc.slot_order.front()});
        }
        w.emit(p.search_fn);
        w.emit("system.set_query_status", {"True"});
        w.emit("system.OFFER", {offer_slots.front()});
        if (sc.inform_count) w.emit("system.INFORM_COUNT");
    }

    if (do_transact) {
        w.emit("user.INFORM_INTENT", {p.transact_intent});
        if (sc.use_select) w.emit("user.SELECT");
        if (sc.post_select_intent_offer && sc.use_select) {
            // the system proposes more searching; the user declines and books
            w.emit("system.OFFER_INTENT", {p.search_intent});
            w.emit("user.NEGATE_INTENT");
            w.emit_if_legal("system.REQ_MORE");
        }
        if (sc.offer_intent && sc.use_select) {
            w.emit("system.OFFER_INTENT", {p.transact_intent});
            if (sc.decline_intent) {
                w.emit("user.NEGATE_INTENT");
                if (sc.req_more) w.emit_if_legal("system.REQ_MORE");
                w.emit("user.THANK_YOU");
                w.emit("user.GOODBYE");
                w.emit("system.GOODBYE");
                return;
            }
            w.emit("user.AFFIRM_INTENT");
        }
        for (const auto& slot : transact_slots) request_and_inform(slot);
        for (const auto& slot : p.confirm_slots)
            if (w.informed(slot) || sc.use_select) w.emit("system.CONFIRM", {slot});
        if (sc.negate_then_affirm) {
            w.emit("user.NEGATE");
            w.emit("user.INFORM", {transact_slots.front()});
            for (const auto& slot : p.confirm_slots)
                if (w.informed(slot) || sc.use_select) w.emit("system.CONFIRM", {slot});
        }
        const bool must_affirm = sc.use_affirm || !sc.use_select;
        if (must_affirm) w.emit("user.AFFIRM");
        if (sc.post_affirm_revision && must_affirm) {
            w.emit("user.INFORM", {transact_slots.front()});
            w.emit("system.CONFIRM", {transact_slots.front()});
            w.emit("user.AFFIRM");
        }
        if (sc.booking_failure) {
            if (!w.emit_if_legal(p.transact_fn)) {
                w.emit("user.AFFIRM");
                w.emit(p.transact_fn);
            }
            w.emit("system.set_query_status", {"False"});
            if (sc.offer_search_on_failure && sc.use_select) {
                w.emit("system.OFFER_INTENT", {p.search_intent});
                w.emit("user.NEGATE_INTENT");
            }
            if (p.has_notify_failure) w.emit("system.NOTIFY_FAILURE");
            w.emit_if_legal("system.REQ_MORE");
            if (sc.use_select) {
                // offer to retry, suggesting alternatives while failed
                w.emit("system.OFFER_INTENT", {p.transact_intent});
                w.emit("user.AFFIRM_INTENT");
            }
            for (const auto& s : sc.during_transact_offers)
                w.emit_if_legal("system.OFFER", {s});
        }
        if (!w.emit_if_legal(p.transact_fn)) {
            // selection alone does not license this domain's transaction
            w.emit("user.AFFIRM");
            w.emit(p.transact_fn);
        }
        w.emit("system.set_query_status", {"True"});
        w.emit("system.NOTIFY_SUCCESS");
        if (sc.booking_failure)
            for (const auto& s : sc.during_transact_offers)
                w.emit_if_legal("system.OFFER", {s});
        if (sc.post_transact_info_slot) info_pair(*sc.post_transact_info_slot);
    }

    if (sc.post_transact_search && do_transact) {
        if (sc.offer_intent) {
            w.emit("system.OFFER_INTENT", {p.search_intent});
            w.emit("user.AFFIRM_INTENT");
        }
        w.emit("user.INFORM_INTENT", {p.search_intent});
        const std::string extra = p.info_slots.back();
        if (!w.informed(extra)) {
            w.emit("system.REQUEST", {extra});
            w.emit("user.INFORM", {extra});
        }
        w.emit(p.search_fn);
        w.emit("system.set_query_status", {"True"});
        w.emit("system.OFFER", {offer_slots.front()});
        if (sc.inform_count) w.emit("system.INFORM_COUNT");
    }
    closing();
}

}  // namespace detail

/// Deterministic scripted demonstrations. Every emitted trajectory satisfies
/// all ground-truth preconditions at each action call; infeasible scenarios
/// raise GenerationError naming the violated assertion.
inline Corpus generate_dialog_demos(const DomainSchema& schema,
                                    const std::vector<DialogScenario>& scenarios,
                                    uint64_t seed, const std::string& id_prefix = "demo") {
    const auto& playbook = detail::playbook_for(schema);
    Corpus corpus;
    corpus.schema_name = schema.name;
    (void)seed;  // scenarios are concrete; the seed names sub-corpora elsewhere
    for (size_t i = 0; i < scenarios.size(); ++i) {
        detail::DialogWriter w(schema, id_prefix + "-" + std::to_string(i));
        detail::run_dialog_scenario(w, playbook, scenarios[i]);
        corpus.trajectories.push_back(std::move(w.traj));
    }
    return corpus;
}

/// Deterministic scenario templates cycled by index. Each of the ten
/// templates targets specific ground-truth boundaries so that one pass
/// through the cycle already pins most mined preconditions to their ground
/// truth. Held-out corpora cycle the same templates, which keeps train and
/// test behavior identically distributed.
inline std::vector<DialogScenario> dialog_scenario_templates(const DomainSchema& schema,
                                                             size_t count, uint64_t seed) {
    const auto& p = detail::playbook_for(schema);
    (void)seed;
    const bool rest = p.has_notify_failure;  // restaurants-shaped vs buses-shaped

    std::vector<DialogScenario> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        DialogScenario sc;
        sc.intents = {p.search_intent, p.transact_intent};
        sc.slot_order = p.search_slots;
        switch (i % 10) {
            case 0:  // full service, appendix-shaped, two info requests, refine
                sc.request_alts = true;
                sc.negate_then_affirm = true;
                sc.info_requests = {p.info_slots[0], p.info_slots[p.info_slots.size() - 1]};
                sc.refine_search = true;
                sc.offer_intent = true;
                sc.post_transact_info_slot = p.info_slots[1 % p.info_slots.size()];
                sc.transact_slots = rest ? std::vector<std::string>{"time", "date"}
                                         : std::vector<std::string>{"travelers", "leaving_time"};
                sc.req_more = true;
                break;
            case 1:  // browse only, system opens, preference slot informed mid-order
                sc.intents = {p.search_intent};
                sc.search_request_first = true;
                sc.slot_order = rest
                                    ? std::vector<std::string>{"city", "price_range", "cuisine"}
                                    : std::vector<std::string>{"from_location", "fare",
                                                               "to_location", "leaving_date"};
                sc.info_requests = {p.info_slots[1], p.info_slots[0]};
                sc.offer_slots = rest ? std::vector<std::string>{"restaurant_name", "cuisine"}
                                      : std::vector<std::string>{"leaving_time", "transfers"};
                sc.req_more = true;
                break;
            case 2:  // transaction without a search; service hiccup; booking fails once
                sc.intents = {p.transact_intent};
                sc.pre_query_failure = true;
                sc.negate_then_affirm = true;
                sc.booking_failure = true;
                sc.req_more = true;
                sc.booking_recovery_slot = rest ? "party_size" : "transfers";
                sc.during_transact_offers =
                    rest ? std::vector<std::string>{"has_live_music", "price_range"}
                         : std::vector<std::string>{"leaving_time", "fare"};
                break;
            case 3:  // query fails, user gives up
                sc.intents = {p.search_intent};
                sc.query_failure = true;
                sc.give_up_on_failure = true;
                sc.req_more = true;
                break;
            case 4:  // failure recovered by a system request; thanks then failing refine
                sc.intents = {p.search_intent};
                sc.slot_order = rest
                                    ? std::vector<std::string>{"cuisine", "city",
                                                               "has_live_music"}
                                    : std::vector<std::string>{"to_location", "from_location",
                                                               "leaving_date"};
                sc.query_failure = true;
                sc.recovery_request_slot = rest ? "price_range" : "fare_type";
                sc.failure_info_slot = p.info_slots[1 % p.info_slots.size()];
                sc.mid_thanks = true;
                sc.refine_search = true;
                sc.refine_fails = true;
                sc.offer_slots = rest
                                     ? std::vector<std::string>{"restaurant_name", "has_live_music"}
                                     : std::vector<std::string>{"leaving_time", "fare_type"};
                break;
            case 5:  // preference search, info answered before the query, no affirm
                sc.early_info_slot = p.info_slots[0];
                sc.slot_order = rest ? std::vector<std::string>{"city", "has_live_music",
                                                                "cuisine"}
                                     : std::vector<std::string>{"from_location", "transfers",
                                                                "to_location", "leaving_date"};
                sc.query_failure = true;
                sc.recovery_request_slot = rest ? "serves_alcohol" : "fare";
                sc.info_requests = {p.info_slots[1], p.info_slots[0]};
                sc.use_affirm = false;
                sc.post_select_intent_offer = true;
                sc.request_alts = true;
                sc.alts_after_info = true;
                sc.req_more = true;
                sc.offer_slots = rest
                                     ? std::vector<std::string>{"restaurant_name", "serves_alcohol"}
                                     : std::vector<std::string>{"fare", "from_location"};
                break;
            case 6:  // thanks mid-dialog, then info and a selection-only booking
                sc.mid_thanks = true;
                sc.slot_order = rest ? std::vector<std::string>{"city", "cuisine",
                                                                "price_range"}
                                     : std::vector<std::string>{"from_location", "to_location",
                                                                "leaving_date", "fare"};
                sc.info_requests = {p.info_slots[p.info_slots.size() - 1]};
                sc.offer_intent = true;
                sc.use_affirm = false;
                sc.req_more = true;
                break;
            case 7:  // selection-only booking fails, alternatives proposed, retried
                sc.use_affirm = false;
                sc.booking_failure = true;
                sc.offer_search_on_failure = true;
                sc.offer_intent = true;
                sc.post_transact_search = true;
                sc.post_transact_info_slot = p.info_slots[1 % p.info_slots.size()];
                sc.transact_slots = rest ? std::vector<std::string>{"time", "party_size"}
                                         : std::vector<std::string>{"travelers"};
                sc.during_transact_offers =
                    rest ? std::vector<std::string>{"date", "time", "party_size"}
                         : std::vector<std::string>{"leaving_date", "travelers"};
                break;
            case 8:  // a new search after a transaction with extra booking slots
                sc.post_transact_search = true;
                sc.offer_intent = true;
                sc.post_affirm_revision = true;
                sc.transact_slots = rest
                                        ? std::vector<std::string>{"time", "date", "party_size"}
                                        : std::vector<std::string>{"travelers", "leaving_time"};
                sc.offer_slots = rest ? std::vector<std::string>{"restaurant_name", "price_range"}
                                      : std::vector<std::string>{"leaving_time", "to_location"};
                sc.req_more = true;
                break;
            case 9:  // service fails before any query (when the domain can say so)
                sc.intents = {p.search_intent};
                if (rest) {
                    sc.pre_query_failure = true;
                    sc.query_failure = true;
                    sc.slot_order = {"city", "serves_alcohol", "cuisine"};
                    sc.early_info_slot = p.info_slots[1];
                    sc.recovery_request_slot = "price_range";
                } else {
                    sc.intents = {p.search_intent, p.transact_intent};
                    sc.slot_order = {"to_location", "fare_type", "from_location",
                                     "leaving_date"};
                    sc.early_info_slot = p.info_slots[0];
                    sc.info_requests = {p.info_slots[1]};
                    sc.offer_intent = true;
                }
                break;
        }
        out.push_back(std::move(sc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Household world and simulator

struct WorldState {
    std::vector<std::string> receptacles;              // roster, in room order
    std::set<std::string> openable;
    std::map<std::string, std::string> placement;      // object -> receptacle
    std::map<std::string, bool> receptacle_open;
    std::map<std::pair<std::string, std::string>, bool> object_prop;
    std::optional<std::string> agent_at;
    std::optional<std::string> inventory;

    std::vector<std::string> contents(const std::string& recep) const {
        std::vector<std::string> out;
        for (const auto& [obj, at] : placement)
            if (at == recep) out.push_back(obj);
        std::sort(out.begin(), out.end());
        return out;
    }

    bool consistent() const {
        // every object has exactly one location; inventory holds at most one
        for (const auto& [obj, at] : placement)
            if (inventory && *inventory == obj) return false;
        return true;
    }
};

struct Task {
    enum class Kind {
        PickAndPlace,
        CleanAndPlace,
        HeatAndPlace,
        CoolAndPlace,
        ExamineWithLight,
        PickTwoAndPlace,
    };
    Kind kind = Kind::PickAndPlace;
    std::string object;
    std::string receptacle;
};

inline const char* to_string(Task::Kind k) {
    switch (k) {
        case Task::Kind::PickAndPlace: return "pick_and_place";
        case Task::Kind::CleanAndPlace: return "clean_and_place";
        case Task::Kind::HeatAndPlace: return "heat_and_place";
        case Task::Kind::CoolAndPlace: return "cool_and_place";
        case Task::Kind::ExamineWithLight: return "examine_with_light";
        case Task::Kind::PickTwoAndPlace: return "pick_two_and_place";
    }
    return "?";
}

inline Task::Kind task_kind_from(const std::string& s) {
    if (s == "pick_and_place") return Task::Kind::PickAndPlace;
    if (s == "clean_and_place") return Task::Kind::CleanAndPlace;
    if (s == "heat_and_place") return Task::Kind::HeatAndPlace;
    if (s == "cool_and_place") return Task::Kind::CoolAndPlace;
    if (s == "examine_with_light") return Task::Kind::ExamineWithLight;
    if (s == "pick_two_and_place") return Task::Kind::PickTwoAndPlace;
    throw GenerationError("unknown task kind '" + s + "'");
}

inline std::string task_goal_text(const Task& t) {
    const std::string obj_type = t.object.substr(0, t.object.find(' '));
    const std::string recep_type = t.receptacle.substr(0, t.receptacle.find(' '));
    switch (t.kind) {
        case Task::Kind::PickAndPlace: return "put some " + obj_type + " on " + recep_type;
        case Task::Kind::CleanAndPlace:
            return "clean some " + obj_type + " and put it in " + recep_type;
        case Task::Kind::HeatAndPlace:
            return "heat some " + obj_type + " and put it in " + recep_type;
        case Task::Kind::CoolAndPlace:
            return "cool some " + obj_type + " and put it in " + recep_type;
        case Task::Kind::ExamineWithLight:
            return "examine the " + obj_type + " with the desklamp";
        case Task::Kind::PickTwoAndPlace:
            return "put two " + obj_type + " in " + recep_type;
    }
    return "";
}

namespace detail {

inline std::string type_prefix(const std::string& name) {
    return name.substr(0, name.find(' '));
}

}  // namespace detail

inline bool task_goal_reached(const WorldState& w, const Task& t) {
    const auto placed_at = [&](const std::string& obj, const std::string& recep) {
        auto it = w.placement.find(obj);
        return it != w.placement.end() && it->second == recep;
    };
    const auto prop = [&](const std::string& obj, const std::string& p) {
        auto it = w.object_prop.find({obj, p});
        return it != w.object_prop.end() && it->second;
    };
    switch (t.kind) {
        case Task::Kind::PickAndPlace: return placed_at(t.object, t.receptacle);
        case Task::Kind::CleanAndPlace:
            return placed_at(t.object, t.receptacle) && prop(t.object, "clean");
        case Task::Kind::HeatAndPlace:
            return placed_at(t.object, t.receptacle) && prop(t.object, "hot");
        case Task::Kind::CoolAndPlace:
            return placed_at(t.object, t.receptacle) && prop(t.object, "cool");
        case Task::Kind::ExamineWithLight: {
            // lamp on while the target object is held or at the agent's spot
            std::string lamp;
            for (const auto& [obj, at] : w.placement)
                if (detail::type_prefix(obj) == "desklamp") lamp = obj;
            if (w.inventory && detail::type_prefix(*w.inventory) == "desklamp")
                lamp = *w.inventory;
            if (lamp.empty() || !prop(lamp, "on")) return false;
            if (w.inventory && *w.inventory == t.object) return true;
            auto it = w.placement.find(t.object);
            return it != w.placement.end() && w.agent_at && it->second == *w.agent_at;
        }
        case Task::Kind::PickTwoAndPlace: {
            int count = 0;
            for (const auto& [obj, at] : w.placement)
                if (detail::type_prefix(obj) == detail::type_prefix(t.object) &&
                    at == t.receptacle)
                    ++count;
            return count >= 2;
        }
    }
    return false;
}

/// Proposes the next action call given the trajectory so far. Policies in
/// policy.hpp adapt to this interface; the scripted expert implements it
/// directly.
struct ActionProposer {
    virtual ~ActionProposer() = default;
    virtual Call propose(const Trajectory& so_far) = 0;
};

struct SimStep {
    Call call;
    bool compatible = false;  // gt precondition held at prediction time
    bool applied = false;     // world transition executed
};

struct SimResult {
    Trajectory trajectory;
    bool success = false;
    std::vector<SimStep> steps;
};

/// Runs one task. Each proposed action is checked against its ground-truth
/// precondition on the observable state; satisfied actions apply their world
/// transition and emit the action call plus auxiliary observation calls,
/// violating or world-infeasible actions are no-ops recorded as failed.
inline SimResult simulate(const DomainSchema& schema, WorldState world, const Task& task,
                          ActionProposer& policy, size_t max_steps,
                          const std::string& traj_id = "sim") {
    SimResult result;
    Trajectory& traj = result.trajectory;
    traj.id = traj_id;
    traj.goal = task_goal_text(task);
    State observable = initial_state(schema);

    const auto emit = [&](const std::string& fn_name, std::vector<std::string> args) {
        const auto* fn = schema.find_function(fn_name);
        Call call{fn_name, std::move(args)};
        if (!fn->is_action())
            for (const auto& rule : fn->effects)
                detail::apply_effect(observable, rule, *fn, call, schema);
        traj.calls.push_back(std::move(call));
    };

    // The room reveal: all receptacles are visible from the start.
    emit("agent.update_visible_objects", world.receptacles);

    const auto reveal_recep = [&](const std::string& recep) {
        const bool openable = world.openable.count(recep) > 0;
        const bool open = world.receptacle_open.count(recep) && world.receptacle_open.at(recep);
        if (openable && !open) {
            emit("env.set_property", {recep, "open", "False"});
            return;
        }
        std::vector<std::string> args{recep};
        for (auto& obj : world.contents(recep)) args.push_back(obj);
        emit("agent.update_visible_objects", args);
    };

    for (size_t step = 0; step < max_steps; ++step) {
        Call call = policy.propose(traj);
        SimStep rec;
        rec.call = call;

        const auto* fn = schema.find_function(call.fn);
        bool well_formed = fn && fn->is_action();
        if (well_formed) {
            try {
                check_call(schema, call, "simulate");
            } catch (const CorpusError&) {
                well_formed = false;
            }
        }
        if (!well_formed) {
            result.steps.push_back(rec);
            continue;
        }

        BindingView binding{fn, &call.args};
        bool compatible = false;
        try {
            compatible = fn->gt_precondition
                             ? eval_expr(*fn->gt_precondition, observable, binding)
                             : true;
        } catch (const std::exception&) {
            compatible = false;
        }
        rec.compatible = compatible;
        if (!compatible) {
            result.steps.push_back(rec);
            continue;
        }

        // World feasibility beyond the observable precondition.
        const auto& args = call.args;
        bool applied = true;
        if (call.fn == "agent.goto") {
            world.agent_at = args[0];
            emit("agent.goto", args);
            reveal_recep(args[0]);
        } else if (call.fn == "agent.open") {
            if (!world.openable.count(args[0])) {
                applied = false;
            } else {
                world.receptacle_open[args[0]] = true;
                emit("agent.open", args);
                emit("env.set_property", {args[0], "open", "True"});
                auto inside = world.contents(args[0]);
                if (!inside.empty()) {
                    std::vector<std::string> upd{args[0]};
                    upd.insert(upd.end(), inside.begin(), inside.end());
                    emit("agent.update_visible_objects", upd);
                }
            }
        } else if (call.fn == "agent.close") {
            if (!world.openable.count(args[0])) {
                applied = false;
            } else {
                world.receptacle_open[args[0]] = false;
                emit("agent.close", args);
                emit("env.set_property", {args[0], "open", "False"});
            }
        } else if (call.fn == "agent.take") {
            auto it = world.placement.find(args[0]);
            if (it == world.placement.end() || it->second != args[1] || world.inventory) {
                applied = false;
            } else {
                world.placement.erase(it);
                world.inventory = args[0];
                emit("agent.take", args);
                emit("agent.add_inventory", {args[0]});
            }
        } else if (call.fn == "agent.put") {
            if (!world.inventory || *world.inventory != args[0]) {
                applied = false;
            } else {
                world.placement[args[0]] = args[1];
                world.inventory = std::nullopt;
                emit("agent.put", args);
                emit("agent.remove_inventory", {args[0]});
            }
        } else if (call.fn == "agent.clean" || call.fn == "agent.heat" ||
                   call.fn == "agent.cool") {
            const std::string prop = call.fn == "agent.clean" ? "clean"
                                     : call.fn == "agent.heat" ? "hot"
                                                               : "cool";
            if (!world.inventory || *world.inventory != args[0]) {
                applied = false;
            } else {
                world.object_prop[{args[0], prop}] = true;
                emit(call.fn, args);
                emit("env.set_property", {args[0], prop, "True"});
            }
        } else if (call.fn == "agent.toggle") {
            auto key = std::make_pair(args[0], std::string("on"));
            const bool now = !(world.object_prop.count(key) && world.object_prop.at(key));
            world.object_prop[key] = now;
            emit("agent.toggle", args);
            emit("env.set_property", {args[0], "on", now ? "True" : "False"});
        } else {
            applied = false;
        }

        rec.applied = applied;
        result.steps.push_back(rec);

        if (applied && task_goal_reached(world, task)) {
            result.success = true;
            break;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// World/task generation and the scripted household expert

/// Deterministic world roster used by generated demos and evaluations; a
/// subset of the schema vocabularies. Object placement is seeded.
inline WorldState make_household_world(uint64_t seed) {
    WorldState w;
    w.receptacles = {"countertop 1", "shelf 1",     "drawer 1", "garbagecan 1",
                     "sinkbasin 1",  "microwave 1", "fridge 1", "desk 1"};
    w.openable = {"drawer 1", "microwave 1", "fridge 1", "sinkbasin 1"};
    const std::vector<std::string> movable = {"spraybottle 1", "candle 1", "candle 2",
                                              "mug 1",         "apple 1",  "cloth 1",
                                              "book 1"};
    const std::vector<std::string> spots = {"countertop 1", "shelf 1", "drawer 1", "desk 1"};
    Rng rng(derive_seed(seed, "household-world"));
    for (const auto& obj : movable) w.placement[obj] = spots[rng.index(spots.size())];
    w.placement["desklamp 1"] = "desk 1";
    return w;
}

inline std::vector<Task> household_task_roster() {
    return {
        {Task::Kind::PickAndPlace, "spraybottle 1", "garbagecan 1"},
        {Task::Kind::PickAndPlace, "desklamp 1", "countertop 1"},
        {Task::Kind::CleanAndPlace, "cloth 1", "countertop 1"},
        {Task::Kind::CleanAndPlace, "mug 1", "shelf 1"},
        {Task::Kind::HeatAndPlace, "mug 1", "countertop 1"},
        {Task::Kind::HeatAndPlace, "apple 1", "garbagecan 1"},
        {Task::Kind::CoolAndPlace, "apple 1", "countertop 1"},
        {Task::Kind::CoolAndPlace, "cloth 1", "shelf 1"},
        {Task::Kind::ExamineWithLight, "book 1", "desk 1"},
        {Task::Kind::ExamineWithLight, "candle 1", "desk 1"},
        {Task::Kind::PickTwoAndPlace, "candle 1", "garbagecan 1"},
        {Task::Kind::PickTwoAndPlace, "candle 1", "drawer 1"},
    };
}

/// Scripted expert: plans from full world knowledge. Across the demo roster
/// the variants deliberately visit every precondition boundary once: objects
/// taken and put while processed, containers opened while holding, receps
/// left open, rinses of everything carried, double toggles, and re-heats
/// after cooling. Uniform behavior here would let the miner read accidental
/// habits as preconditions.
class HouseholdExpert : public ActionProposer {
public:
    HouseholdExpert(const WorldState& world, const Task& task, uint64_t seed,
                    int variant = 0) {
        build_plan(world, task, seed, variant);
    }

    Call propose(const Trajectory&) override {
        if (next_ >= plan_.size()) return Call{"agent.goto", {"countertop 1"}};
        return plan_[next_++];
    }

    const std::vector<Call>& plan() const { return plan_; }

private:
    std::vector<Call> plan_;
    size_t next_ = 0;

    void build_plan(const WorldState& world, const Task& task, uint64_t seed, int variant) {
        Rng rng(derive_seed(seed, "household-expert"));
        WorldState w = world;  // simulated copy for planning
        const bool alt = variant % 2 == 1;

        const auto go = [&](const std::string& recep) {
            plan_.push_back({"agent.goto", {recep}});
            w.agent_at = recep;
        };
        const auto open_it = [&](const std::string& recep) {
            if (w.openable.count(recep) &&
                !(w.receptacle_open.count(recep) && w.receptacle_open.at(recep))) {
                plan_.push_back({"agent.open", {recep}});
                w.receptacle_open[recep] = true;
            }
        };
        const auto close_it = [&](const std::string& recep) {
            if (w.openable.count(recep) && w.receptacle_open.count(recep) &&
                w.receptacle_open.at(recep)) {
                plan_.push_back({"agent.close", {recep}});
                w.receptacle_open[recep] = false;
            }
        };
        const auto take = [&](const std::string& obj) {
            const std::string at = w.placement.at(obj);
            plan_.push_back({"agent.take", {obj, at}});
            w.placement.erase(obj);
            w.inventory = obj;
        };
        const auto put = [&](const std::string& obj, const std::string& recep) {
            plan_.push_back({"agent.put", {obj, recep}});
            w.placement[obj] = recep;
            w.inventory = std::nullopt;
        };
        const auto decoy_visit = [&] {
            // an unrelated look around the room, empty drawer checks included
            const auto& r = w.receptacles[rng.index(w.receptacles.size())];
            go(r);
            if (r == "drawer 1" && w.contents(r).empty() &&
                !(w.receptacle_open.count(r) && w.receptacle_open.at(r))) {
                open_it(r);
                close_it(r);
            }
        };
        const auto fetch = [&](const std::string& obj) {
            const std::string at = w.placement.at(obj);
            decoy_visit();
            go(at);
            open_it(at);
            take(obj);
        };
        const auto rinse = [&](const std::string& obj) {
            go("sinkbasin 1");
            plan_.push_back({"agent.clean", {obj, "sinkbasin 1"}});
        };
        const auto deliver = [&](const std::string& obj, const std::string& recep,
                                 bool adjust) {
            go(recep);
            open_it(recep);
            put(obj, recep);
            if (adjust) {  // reposition it
                take(obj);
                put(obj, recep);
            }
        };
        const auto station_visit = [&](const std::string& obj, const std::string& verb,
                                       const std::string& station, bool set_down,
                                       bool close_after, bool open_first = true) {
            go(station);
            if (open_first || set_down) open_it(station);
            plan_.push_back({"agent." + verb, {obj, station}});
            if (set_down) {
                put(obj, station);
                take(obj);
            }
            if (close_after) close_it(station);
        };
        const auto rest_at = [&](const std::string& obj, const std::string& recep) {
            go(recep);
            put(obj, recep);
            take(obj);
        };

        switch (task.kind) {
            case Task::Kind::PickAndPlace:
                if (!alt) {  // checks the drawer first
                    go("drawer 1");
                    open_it("drawer 1");
                    close_it("drawer 1");
                }
                fetch(task.object);
                rinse(task.object);
                if (alt && task.receptacle != "shelf 1") rest_at(task.object, "shelf 1");
                deliver(task.object, task.receptacle, false);
                break;
            case Task::Kind::CleanAndPlace:
                fetch(task.object);
                if (!alt) rinse(task.object);  // task clean is then a re-clean
                station_visit(task.object, "clean", "sinkbasin 1", !alt, !alt);
                if (alt && task.receptacle != "countertop 1")
                    rest_at(task.object, "countertop 1");
                deliver(task.object, task.receptacle, false);
                break;
            case Task::Kind::HeatAndPlace:
                fetch(task.object);
                if (alt) {
                    station_visit(task.object, "heat", "microwave 1", false, false, false);
                    rinse(task.object);  // wiped down while hot
                    station_visit(task.object, "heat", "microwave 1", false, false, false);
                } else {
                    // flips the mug's switch on, overheats, chills, reheats;
                    // fiddles with the switch in between
                    plan_.push_back({"agent.toggle", {task.object}});
                    station_visit(task.object, "heat", "microwave 1", false, false);
                    station_visit(task.object, "cool", "fridge 1", false, true);
                    plan_.push_back({"agent.toggle", {task.object}});
                    plan_.push_back({"agent.toggle", {task.object}});
                    station_visit(task.object, "heat", "microwave 1", true, true);
                    rinse(task.object);
                    plan_.push_back({"agent.toggle", {task.object}});
                }
                deliver(task.object, task.receptacle, false);
                break;
            case Task::Kind::CoolAndPlace:
                fetch(task.object);
                if (alt) {
                    // rinsed first; too cold, so warmed back up and re-chilled
                    rinse(task.object);
                    station_visit(task.object, "cool", "fridge 1", false, false, false);
                    station_visit(task.object, "heat", "microwave 1", false, false, false);
                    station_visit(task.object, "cool", "fridge 1", false, false, false);
                } else {
                    station_visit(task.object, "cool", "fridge 1", true, true);
                    rinse(task.object);
                }
                deliver(task.object, task.receptacle, false);
                break;
            case Task::Kind::ExamineWithLight: {
                std::string lamp, lamp_at;
                for (const auto& [obj, at] : w.placement)
                    if (detail::type_prefix(obj) == "desklamp") {
                        lamp = obj;
                        lamp_at = at;
                    }
                if (!alt) {
                    // fiddles with the lamp hands-free, fetches the object,
                    // sets it down under the lamp, then switches it on
                    go(lamp_at);
                    plan_.push_back({"agent.toggle", {lamp}});
                    plan_.push_back({"agent.toggle", {lamp}});
                    fetch(task.object);
                    rinse(task.object);
                    go(lamp_at);
                    put(task.object, lamp_at);
                    plan_.push_back({"agent.toggle", {lamp}});
                } else {
                    fetch(task.object);
                    go(lamp_at);
                    plan_.push_back({"agent.toggle", {lamp}});  // holding the object
                }
                break;
            }
            case Task::Kind::PickTwoAndPlace: {
                std::vector<std::string> matches;
                for (const auto& [obj, at] : w.placement)
                    if (detail::type_prefix(obj) == detail::type_prefix(task.object))
                        matches.push_back(obj);
                std::sort(matches.begin(), matches.end());
                if (!alt) {
                    bool first = true;
                    for (const auto& obj : matches) {
                        if (w.placement.at(obj) == task.receptacle) continue;
                        fetch(obj);
                        rinse(obj);
                        deliver(obj, task.receptacle, first);
                        first = false;
                    }
                } else {
                    // carry the first over, opening the target while holding it
                    std::string held;
                    for (const auto& obj : matches) {
                        if (w.placement.at(obj) == task.receptacle) continue;
                        const std::string at = w.placement.at(obj);
                        go(at);
                        open_it(at);
                        take(obj);
                        if (held.empty()) rinse(obj);
                        go(task.receptacle);
                        open_it(task.receptacle);  // may happen while holding
                        put(obj, task.receptacle);
                        held = obj;
                    }
                }
                break;
            }
        }
    }
};

/// Expert demonstrations for the household domain: `per_kind` trajectories
/// for each of the six task kinds, on seeded worlds, alternating the expert's
/// plan variants.
inline Corpus generate_household_demos(const DomainSchema& schema, size_t per_kind,
                                       uint64_t seed, const std::string& id_prefix = "demo",
                                       size_t max_steps = 80) {
    Corpus corpus;
    corpus.schema_name = schema.name;
    const auto roster = household_task_roster();
    size_t emitted = 0;
    for (size_t j = 0; j < per_kind; ++j) {
        for (size_t k = 0; k < 6; ++k) {
            const Task& task = roster[k * 2 + (j % 2)];
            const uint64_t wseed = derive_seed(seed, "world-" + std::to_string(emitted));
            WorldState world = make_household_world(wseed);
            if (task.kind == Task::Kind::ExamineWithLight) {
                // the object is fetched from elsewhere, never already lit up
                const auto& lamp_at = world.placement.at("desklamp 1");
                if (world.placement.at(task.object) == lamp_at)
                    world.placement[task.object] = "countertop 1";
            }
            HouseholdExpert expert(world, task, wseed, static_cast<int>(j % 2));
            SimResult sim = simulate(schema, world, task, expert, max_steps,
                                     id_prefix + "-" + std::to_string(emitted));
            if (!sim.success)
                throw GenerationError("household expert failed task '" +
                                      task_goal_text(task) + "' (seed " +
                                      std::to_string(wseed) + ")");
            corpus.trajectories.push_back(std::move(sim.trajectory));
            ++emitted;
        }
    }
    return corpus;
}

}  // namespace precond

/* hello.c - sample module exposed through the svar entry-table ABI.
 *
 * Deliberately self-contained: no headers shared with any host, only the
 * ABI contract documented in docs/abi.md.  Values are heap-allocated
 * refcounted tagged unions; handles are value pointers cast to u64.
 */

#include <stdint.h>
#include <stdlib.h>
#include <string.h>
#include <stdio.h>

/* ---- kinds (ABI constants, must match docs/abi.md) ---- */
enum {
    K_UNDEFINED = 0, K_NULL = 1, K_BOOL = 2, K_INTEGER = 3, K_REAL = 4,
    K_STRING = 5, K_BUFFER = 6, K_ARRAY = 7, K_OBJECT = 8,
    K_FUNCTION = 9, K_CLASS = 10, K_INSTANCE = 11, K_ERROR = 12,
};

/* ---- host entry table (mirror of the shared layout) ---- */
typedef struct SvarEntryTable {
    uint32_t (*abi_version)(void);
    uint64_t (*module_root)(void);
    int32_t  (*value_kind)(uint64_t h);
    uint64_t (*value_clone)(uint64_t h);
    void     (*value_release)(uint64_t h);
    int64_t  (*value_int)(uint64_t h);
    double   (*value_real)(uint64_t h);
    uint64_t (*value_string)(uint64_t h, char *buf, uint64_t cap);
    uint64_t (*value_buffer)(uint64_t h, char *fmt, uint64_t *shape,
                             uint64_t cap_dims, uint64_t *ndim,
                             uint8_t *data, uint64_t cap);
    uint64_t (*array_size)(uint64_t h);
    uint64_t (*array_get)(uint64_t h, uint64_t idx);
    uint64_t (*object_keys)(uint64_t h);
    uint64_t (*object_get)(uint64_t h, const char *key);
    int32_t  (*object_set)(uint64_t h, const char *key, uint64_t val);
    int32_t  (*call)(uint64_t fn, uint64_t n_pos, const uint64_t *pos,
                     uint64_t n_kw, const char *const *kw_names,
                     const uint64_t *kw_vals,
                     uint64_t *out_result, uint64_t *out_error);
    uint64_t (*describe)(uint64_t h);
} SvarEntryTable;

static const SvarEntryTable *g_host = NULL;

/* ---- value representation ---- */

typedef struct sv sv;

#define MAX_PARAMS 16

typedef struct Param {
    const char *name;
    sv *dflt;               /* NULL when required */
} Param;

typedef struct Overload {
    int n_params;           /* not counting any bound receiver */
    Param params[MAX_PARAMS];
    sv *(*impl)(sv **args, int argc, char **err);
} Overload;

typedef struct Fn {
    const char *name;
    const char *doc;
    int n_over;
    const Overload *overs;
    sv *self;               /* bound receiver, NULL for free functions */
    int heap;               /* freed with the value when set */
} Fn;

typedef struct Method {
    const char *name;
    Fn *fn;
} Method;

typedef struct Cls {
    const char *name;
    const char *doc;
    Fn *ctor;
    int n_methods;
    Method *methods;
} Cls;

struct sv {
    int refs;
    int kind;
    union {
        int64_t i;
        double d;
        struct { char *ptr; size_t len; } s;        /* STRING, ERROR */
        struct { char fmt; uint64_t ndim; uint64_t shape[8];
                 uint8_t *data; size_t len; } buf;
        struct { sv **items; size_t len, cap; } arr;
        struct { char **keys; sv **vals; size_t len, cap; } obj;
        struct { Fn *fn; } f;
        struct { Cls *cls; } c;
        struct { Cls *cls; sv *state; } inst;       /* state: OBJECT */
        uint64_t foreign;                           /* host-owned handle */
    } u;
    int is_foreign;         /* FUNCTION backed by a host handle */
};

static sv *sv_new(int kind) {
    sv *v = (sv *)calloc(1, sizeof(sv));
    v->refs = 1;
    v->kind = kind;
    return v;
}

static sv *sv_ref(sv *v) { if (v) v->refs++; return v; }
static void sv_unref(sv *v);

static void sv_free(sv *v) {
    size_t i;
    switch (v->kind) {
    case K_STRING: case K_ERROR:
        free(v->u.s.ptr); break;
    case K_BUFFER:
        free(v->u.buf.data); break;
    case K_ARRAY:
        for (i = 0; i < v->u.arr.len; i++) sv_unref(v->u.arr.items[i]);
        free(v->u.arr.items); break;
    case K_OBJECT:
        for (i = 0; i < v->u.obj.len; i++) {
            free(v->u.obj.keys[i]);
            sv_unref(v->u.obj.vals[i]);
        }
        free(v->u.obj.keys); free(v->u.obj.vals); break;
    case K_FUNCTION:
        if (v->is_foreign) {
            if (g_host) g_host->value_release(v->u.foreign);
        } else if (v->u.f.fn && v->u.f.fn->heap) {
            sv_unref(v->u.f.fn->self);
            free(v->u.f.fn);
        }
        break;
    case K_INSTANCE:
        sv_unref(v->u.inst.state); break;
    default: break;
    }
    free(v);
}

static void sv_unref(sv *v) {
    if (v && --v->refs == 0) sv_free(v);
}

static char *xstrdup(const char *s) {
    size_t n = strlen(s) + 1;
    char *p = (char *)malloc(n);
    memcpy(p, s, n);
    return p;
}

/* ---- constructors ---- */

static sv *sv_undefined(void) { return sv_new(K_UNDEFINED); }
static sv *sv_null(void)      { return sv_new(K_NULL); }

static sv *sv_bool(int b) {
    sv *v = sv_new(K_BOOL); v->u.i = b ? 1 : 0; return v;
}

static sv *sv_int(int64_t i) {
    sv *v = sv_new(K_INTEGER); v->u.i = i; return v;
}

static sv *sv_real(double d) {
    sv *v = sv_new(K_REAL); v->u.d = d; return v;
}

static sv *sv_string_n(const char *s, size_t n) {
    sv *v = sv_new(K_STRING);
    v->u.s.ptr = (char *)malloc(n + 1);
    memcpy(v->u.s.ptr, s, n);
    v->u.s.ptr[n] = 0;
    v->u.s.len = n;
    return v;
}

static sv *sv_string(const char *s) { return sv_string_n(s, strlen(s)); }

static sv *sv_error(const char *msg) {
    sv *v = sv_string(msg);
    v->kind = K_ERROR;
    return v;
}

static sv *sv_array(void) { return sv_new(K_ARRAY); }

static void arr_push(sv *a, sv *item) {   /* takes ownership */
    if (a->u.arr.len == a->u.arr.cap) {
        a->u.arr.cap = a->u.arr.cap ? a->u.arr.cap * 2 : 8;
        a->u.arr.items = (sv **)realloc(a->u.arr.items,
                                        a->u.arr.cap * sizeof(sv *));
    }
    a->u.arr.items[a->u.arr.len++] = item;
}

static sv *sv_object(void) { return sv_new(K_OBJECT); }

/* insertion order preserved; existing key replaced in place */
static void obj_set(sv *o, const char *key, sv *val) {  /* takes ownership */
    size_t i;
    for (i = 0; i < o->u.obj.len; i++) {
        if (strcmp(o->u.obj.keys[i], key) == 0) {
            sv_unref(o->u.obj.vals[i]);
            o->u.obj.vals[i] = val;
            return;
        }
    }
    if (o->u.obj.len == o->u.obj.cap) {
        o->u.obj.cap = o->u.obj.cap ? o->u.obj.cap * 2 : 8;
        o->u.obj.keys = (char **)realloc(o->u.obj.keys,
                                         o->u.obj.cap * sizeof(char *));
        o->u.obj.vals = (sv **)realloc(o->u.obj.vals,
                                       o->u.obj.cap * sizeof(sv *));
    }
    o->u.obj.keys[o->u.obj.len] = xstrdup(key);
    o->u.obj.vals[o->u.obj.len] = val;
    o->u.obj.len++;
}

static sv *obj_get(sv *o, const char *key) {  /* borrowed, NULL if absent */
    size_t i;
    for (i = 0; i < o->u.obj.len; i++)
        if (strcmp(o->u.obj.keys[i], key) == 0) return o->u.obj.vals[i];
    return NULL;
}

static sv *sv_function(Fn *fn) {
    sv *v = sv_new(K_FUNCTION); v->u.f.fn = fn; return v;
}

static sv *sv_class(Cls *cls) {
    sv *v = sv_new(K_CLASS); v->u.c.cls = cls; return v;
}

/* ---- handle emit / host import ---- */

static uint64_t emit(sv *v) {           /* new handle, ref held by holder */
    return (uint64_t)(uintptr_t)sv_ref(v);
}

static sv *from_handle(uint64_t h) { return (sv *)(uintptr_t)h; }

static sv *import_host(uint64_t h);

static sv *import_host(uint64_t h) {
    int32_t k = g_host->value_kind(h);
    switch (k) {
    case K_UNDEFINED: return sv_undefined();
    case K_NULL:      return sv_null();
    case K_BOOL:      return sv_bool((int)g_host->value_int(h));
    case K_INTEGER:   return sv_int(g_host->value_int(h));
    case K_REAL:      return sv_real(g_host->value_real(h));
    case K_STRING: case K_ERROR: {
        uint64_t n = g_host->value_string(h, NULL, 0);
        char *buf = (char *)malloc(n + 1);
        g_host->value_string(h, buf, n);
        buf[n] = 0;
        sv *v = sv_string_n(buf, (size_t)n);
        if (k == K_ERROR) v->kind = K_ERROR;
        free(buf);
        return v;
    }
    case K_BUFFER: {
        sv *v = sv_new(K_BUFFER);
        char fmt = 0;
        uint64_t ndim = 0;
        uint64_t n = g_host->value_buffer(h, &fmt, v->u.buf.shape, 8,
                                          &ndim, NULL, 0);
        v->u.buf.data = (uint8_t *)malloc(n ? n : 1);
        g_host->value_buffer(h, &fmt, v->u.buf.shape, 8, &ndim,
                             v->u.buf.data, n);
        v->u.buf.fmt = fmt;
        v->u.buf.ndim = ndim;
        v->u.buf.len = (size_t)n;
        return v;
    }
    case K_ARRAY: {
        sv *a = sv_array();
        uint64_t n = g_host->array_size(h), i;
        for (i = 0; i < n; i++) {
            uint64_t ch = g_host->array_get(h, i);
            arr_push(a, import_host(ch));
            g_host->value_release(ch);
        }
        return a;
    }
    case K_OBJECT: {
        sv *o = sv_object();
        uint64_t kh = g_host->object_keys(h);
        sv *keys = import_host(kh);
        g_host->value_release(kh);
        size_t i;
        for (i = 0; i < keys->u.arr.len; i++) {
            const char *key = keys->u.arr.items[i]->u.s.ptr;
            uint64_t gh = g_host->object_get(h, key);
            if (gh) {
                obj_set(o, key, import_host(gh));
                g_host->value_release(gh);
            }
        }
        sv_unref(keys);
        return o;
    }
    default: {
        /* behaviour stays on the host side: keep a proxy handle */
        sv *v = sv_new(K_FUNCTION);
        v->is_foreign = 1;
        v->u.foreign = g_host->value_clone(h);
        return v;
    }
    }
}

/* ---- calling ---- */

static sv *call_foreign(sv *f, sv **args, int argc, char **err) {
    uint64_t pos[MAX_PARAMS] = {0};
    uint64_t res = 0, errh = 0;
    int i;
    for (i = 0; i < argc; i++) pos[i] = emit(args[i]);
    int32_t st = g_host->call(f->u.foreign, (uint64_t)argc, pos,
                              0, NULL, NULL, &res, &errh);
    for (i = 0; i < argc; i++) sv_unref(from_handle(pos[i]));
    if (st == 0) {
        sv *out = import_host(res);
        g_host->value_release(res);
        return out;
    }
    sv *e = import_host(errh);
    g_host->value_release(errh);
    if (e->kind == K_ERROR || e->kind == K_STRING)
        *err = xstrdup(e->u.s.ptr);
    else
        *err = xstrdup("callback failed");
    sv_unref(e);
    return NULL;
}

static sv *construct(Cls *cls, sv **args, int argc, char **err);

/* count-and-name overload binder; no type coercion on this side */
static sv *fn_invoke(sv *fnv, uint64_t n_pos, const uint64_t *pos,
                     uint64_t n_kw, const char *const *kw_names,
                     const uint64_t *kw_vals, char **err) {
    sv *args[MAX_PARAMS];
    int argc = 0, i;
    sv *out = NULL;

    for (i = 0; i < (int)n_pos && argc < MAX_PARAMS; i++)
        args[argc++] = import_host(pos[i]);

    if (fnv->kind == K_CLASS) {
        if (n_kw) { *err = xstrdup("constructor takes no keywords"); goto done; }
        out = construct(fnv->u.c.cls, args, argc, err);
        goto done;
    }

    Fn *fn = fnv->u.f.fn;
    if (fnv->is_foreign) {
        if (n_kw) { *err = xstrdup("foreign call takes no keywords"); goto done; }
        out = call_foreign(fnv, args, argc, err);
        goto done;
    }

    int o;
    for (o = 0; o < fn->n_over; o++) {
        const Overload *ov = &fn->overs[o];
        sv *slots[MAX_PARAMS + 1];
        int base = fn->self ? 1 : 0;
        int total = base + ov->n_params;
        int j, ok = 1;
        for (j = 0; j < total; j++) slots[j] = NULL;
        if (fn->self) slots[0] = fn->self;
        if (argc > ov->n_params) continue;
        for (j = 0; j < argc; j++) slots[base + j] = args[j];
        for (j = 0; j < (int)n_kw; j++) {
            int p, hit = -1;
            for (p = 0; p < ov->n_params; p++)
                if (strcmp(ov->params[p].name, kw_names[j]) == 0) hit = p;
            if (hit < 0 || slots[base + hit] != NULL) { ok = 0; break; }
            slots[base + hit] = import_host(kw_vals[j]);
            /* imported keyword values are freed with args below */
            args[argc++] = slots[base + hit];
        }
        if (ok) {
            for (j = 0; j < ov->n_params; j++) {
                if (slots[base + j] == NULL) {
                    if (ov->params[j].dflt == NULL) { ok = 0; break; }
                    slots[base + j] = ov->params[j].dflt;
                }
            }
        }
        if (!ok) continue;
        out = ov->impl(slots, total, err);
        goto done;
    }
    {
        char msg[160];
        snprintf(msg, sizeof msg,
                 "no overload of %s matches %d positional and %d keyword "
                 "arguments", fn->name, (int)n_pos, (int)n_kw);
        *err = xstrdup(msg);
    }
done:
    for (i = 0; i < argc; i++) sv_unref(args[i]);
    return out;
}

/* ---- module content ---- */

static sv *impl_say(sv **args, int argc, char **err) {
    (void)argc;
    if (args[0]->kind != K_STRING) {
        *err = xstrdup("say expects a string");
        return NULL;
    }
    fprintf(stderr, "%s\n", args[0]->u.s.ptr);
    fflush(stderr);
    return sv_undefined();
}

static const Overload say_overs[] = {
    { 1, { { "text", NULL } }, impl_say },
};
static Fn fn_say = { "say", "print a line to stderr", 1, say_overs, NULL, 0 };

static sv *impl_echo(sv **args, int argc, char **err) {
    (void)argc; (void)err;
    return sv_ref(args[0]);
}

static const Overload echo_overs[] = {
    { 1, { { "x", NULL } }, impl_echo },
};
static Fn fn_echo = { "echo", "return the argument unchanged", 1, echo_overs,
                      NULL, 0 };

static int64_t as_int(sv *v) {
    if (v->kind == K_REAL) return (int64_t)v->u.d;
    return v->u.i;
}

static sv *impl_kw2(sv **args, int argc, char **err) {
    (void)argc; (void)err;
    return sv_int(as_int(args[0]) + as_int(args[1]));
}

static sv *impl_kw3(sv **args, int argc, char **err) {
    (void)argc; (void)err;
    return sv_int(as_int(args[0]) + as_int(args[1]) + as_int(args[2]));
}

static sv *kw_default_b;   /* int 0, made at entry time */

static Overload kwf_overs[] = {
    { 2, { { "a", NULL }, { "b", NULL /* patched to 0 */ } }, impl_kw2 },
    { 3, { { "a", NULL }, { "b", NULL }, { "c", NULL } }, impl_kw3 },
};
static Fn fn_kwf = { "kw_f", "add two or three numbers; b defaults to 0",
                     2, kwf_overs, NULL, 0 };

static sv *impl_apply(sv **args, int argc, char **err) {
    (void)argc;
    sv *f = args[0];
    if (f->kind != K_FUNCTION) {
        *err = xstrdup("apply expects a callable first argument");
        return NULL;
    }
    if (f->is_foreign) {
        sv *one[1] = { args[1] };
        return call_foreign(f, one, 1, err);
    }
    uint64_t vh = emit(args[1]);
    uint64_t pos[1] = { vh };
    sv *out = fn_invoke(f, 1, pos, 0, NULL, NULL, err);
    sv_unref(from_handle(vh));
    return out;
}

static const Overload apply_overs[] = {
    { 2, { { "f", NULL }, { "v", NULL } }, impl_apply },
};
static Fn fn_apply = { "apply", "call f with a single argument v",
                       1, apply_overs, NULL, 0 };

/* Person: one string field held in an OBJECT state */

static Cls cls_person;

static sv *impl_person_new(sv **args, int argc, char **err) {
    (void)argc;
    if (args[0]->kind != K_STRING) {
        *err = xstrdup("Person(name) expects a string");
        return NULL;
    }
    sv *inst = sv_new(K_INSTANCE);
    inst->u.inst.cls = &cls_person;
    inst->u.inst.state = sv_object();
    obj_set(inst->u.inst.state, "name", sv_ref(args[0]));
    return inst;
}

static void json_escape_into(sv *out_unused, const char *s, char *dst,
                             size_t cap) {
    (void)out_unused;
    size_t w = 0;
    for (; *s && w + 8 < cap; s++) {
        unsigned char c = (unsigned char)*s;
        if (c == '"' || c == '\\') { dst[w++] = '\\'; dst[w++] = (char)c; }
        else if (c < 0x20) {
            w += (size_t)snprintf(dst + w, cap - w, "\\u%04x", c);
        } else dst[w++] = (char)c;
    }
    dst[w] = 0;
}

static sv *impl_person_info(sv **args, int argc, char **err) {
    (void)argc; (void)err;
    sv *self = args[0];
    sv *name = obj_get(self->u.inst.state, "name");
    char esc[512], line[560];
    json_escape_into(NULL, name ? name->u.s.ptr : "", esc, sizeof esc);
    snprintf(line, sizeof line, "{\"name\":\"%s\"}", esc);
    return sv_string(line);
}

static const Overload person_ctor_overs[] = {
    { 1, { { "name", NULL } }, impl_person_new },
};
static Fn person_ctor = { "__init__", "Person(name)", 1, person_ctor_overs,
                          NULL, 0 };

static const Overload person_info_overs[] = {
    { 0, { { "", NULL } }, impl_person_info },
};
static Fn person_info = { "info", "state as a json string", 1,
                          person_info_overs, NULL, 0 };
static Fn person_intro = { "intro", "state as a json string", 1,
                           person_info_overs, NULL, 0 };

static Method person_methods[] = {
    { "info", &person_info },
    { "intro", &person_intro },
};

static Cls cls_person = {
    "Person", "a person with a name", &person_ctor, 2, person_methods,
};

static sv *construct(Cls *cls, sv **args, int argc, char **err) {
    int o;
    Fn *fn = cls->ctor;
    for (o = 0; o < fn->n_over; o++) {
        if (fn->overs[o].n_params == argc)
            return fn->overs[o].impl(args, argc, err);
    }
    {
        char msg[128];
        snprintf(msg, sizeof msg, "%s: no constructor takes %d arguments",
                 cls->name, argc);
        *err = xstrdup(msg);
    }
    return NULL;
}

/* ---- module root ---- */

static sv *g_root = NULL;

static void build_root(void) {
    if (g_root) return;
    kw_default_b = sv_int(0);
    kwf_overs[0].params[1].dflt = kw_default_b;
    g_root = sv_object();
    obj_set(g_root, "__doc__", sv_string("Sample C based module"));
    obj_set(g_root, "say", sv_function(&fn_say));
    obj_set(g_root, "echo", sv_function(&fn_echo));
    obj_set(g_root, "kw_f", sv_function(&fn_kwf));
    obj_set(g_root, "apply", sv_function(&fn_apply));
    obj_set(g_root, "version", sv_int(1));
    obj_set(g_root, "Person", sv_class(&cls_person));
}

/* ---- exported table ---- */

static uint32_t e_abi_version(void) { return 1; }

static uint64_t e_module_root(void) {
    build_root();
    return emit(g_root);
}

static int32_t e_value_kind(uint64_t h) {
    sv *v = from_handle(h);
    return v ? v->kind : -1;
}

static uint64_t e_value_clone(uint64_t h) {
    return emit(from_handle(h));
}

static void e_value_release(uint64_t h) {
    sv_unref(from_handle(h));
}

static int64_t e_value_int(uint64_t h) {
    sv *v = from_handle(h);
    if (v->kind == K_REAL) return (int64_t)v->u.d;
    return v->u.i;
}

static double e_value_real(uint64_t h) {
    sv *v = from_handle(h);
    if (v->kind == K_REAL) return v->u.d;
    return (double)v->u.i;
}

static uint64_t e_value_string(uint64_t h, char *buf, uint64_t cap) {
    sv *v = from_handle(h);
    if (v->kind != K_STRING && v->kind != K_ERROR) return 0;
    if (buf && cap) {
        uint64_t n = v->u.s.len < cap ? v->u.s.len : cap;
        memcpy(buf, v->u.s.ptr, (size_t)n);
    }
    return (uint64_t)v->u.s.len;
}

static uint64_t e_value_buffer(uint64_t h, char *fmt, uint64_t *shape,
                               uint64_t cap_dims, uint64_t *ndim,
                               uint8_t *data, uint64_t cap) {
    sv *v = from_handle(h);
    if (v->kind != K_BUFFER) return 0;
    if (fmt) *fmt = v->u.buf.fmt;
    if (ndim) *ndim = v->u.buf.ndim;
    if (shape) {
        uint64_t i, n = v->u.buf.ndim < cap_dims ? v->u.buf.ndim : cap_dims;
        for (i = 0; i < n; i++) shape[i] = v->u.buf.shape[i];
    }
    if (data && cap) {
        uint64_t n = v->u.buf.len < cap ? v->u.buf.len : cap;
        memcpy(data, v->u.buf.data, (size_t)n);
    }
    return (uint64_t)v->u.buf.len;
}

static uint64_t e_array_size(uint64_t h) {
    sv *v = from_handle(h);
    return v->kind == K_ARRAY ? (uint64_t)v->u.arr.len : 0;
}

static uint64_t e_array_get(uint64_t h, uint64_t idx) {
    sv *v = from_handle(h);
    if (v->kind != K_ARRAY || idx >= v->u.arr.len) return 0;
    return emit(v->u.arr.items[idx]);
}

static uint64_t e_object_keys(uint64_t h) {
    sv *v = from_handle(h);
    sv *keys = sv_array();
    if (v->kind == K_OBJECT) {
        size_t i;
        for (i = 0; i < v->u.obj.len; i++)
            arr_push(keys, sv_string(v->u.obj.keys[i]));
    } else if (v->kind == K_INSTANCE) {
        sv *st = v->u.inst.state;
        size_t i;
        for (i = 0; i < st->u.obj.len; i++)
            arr_push(keys, sv_string(st->u.obj.keys[i]));
    }
    uint64_t out = emit(keys);
    sv_unref(keys);
    return out;
}

static sv *bound_method(sv *inst, Fn *fn) {
    Fn *b = (Fn *)calloc(1, sizeof(Fn));
    *b = *fn;
    b->self = sv_ref(inst);
    b->heap = 1;
    return sv_function(b);
}

static uint64_t e_object_get(uint64_t h, const char *key) {
    sv *v = from_handle(h);
    if (v->kind == K_OBJECT) {
        sv *hit = obj_get(v, key);
        return hit ? emit(hit) : 0;
    }
    if (v->kind == K_INSTANCE) {
        sv *hit = obj_get(v->u.inst.state, key);
        if (hit) return emit(hit);
        Cls *cls = v->u.inst.cls;
        int i;
        for (i = 0; i < cls->n_methods; i++) {
            if (strcmp(cls->methods[i].name, key) == 0) {
                sv *b = bound_method(v, cls->methods[i].fn);
                uint64_t out = emit(b);
                sv_unref(b);
                return out;
            }
        }
        return 0;
    }
    if (v->kind == K_CLASS) {
        Cls *cls = v->u.c.cls;
        int i;
        for (i = 0; i < cls->n_methods; i++) {
            if (strcmp(cls->methods[i].name, key) == 0) {
                sv *f = sv_function(cls->methods[i].fn);
                uint64_t out = emit(f);
                sv_unref(f);
                return out;
            }
        }
        return 0;
    }
    return 0;
}

static int32_t e_object_set(uint64_t h, const char *key, uint64_t val) {
    sv *v = from_handle(h);
    if (v->kind == K_OBJECT) {
        obj_set(v, key, import_host(val));
        return 0;
    }
    if (v->kind == K_INSTANCE) {
        obj_set(v->u.inst.state, key, import_host(val));
        return 0;
    }
    return 1;
}

static int32_t e_call(uint64_t fn, uint64_t n_pos, const uint64_t *pos,
                      uint64_t n_kw, const char *const *kw_names,
                      const uint64_t *kw_vals,
                      uint64_t *out_result, uint64_t *out_error) {
    sv *v = from_handle(fn);
    char *err = NULL;
    if (v->kind != K_FUNCTION && v->kind != K_CLASS) {
        sv *e = sv_error("handle is not callable");
        *out_error = emit(e);
        sv_unref(e);
        return 1;
    }
    sv *out = fn_invoke(v, n_pos, pos, n_kw, kw_names, kw_vals, &err);
    if (out == NULL) {
        sv *e = sv_error(err ? err : "call failed");
        free(err);
        *out_error = emit(e);
        sv_unref(e);
        return 1;
    }
    *out_result = emit(out);
    sv_unref(out);
    return 0;
}

static sv *describe_fn(Fn *fn) {
    sv *d = sv_object();
    obj_set(d, "name", sv_string(fn->name));
    obj_set(d, "doc", sv_string(fn->doc ? fn->doc : ""));
    sv *overs = sv_array();
    int o;
    for (o = 0; o < fn->n_over; o++) {
        sv *od = sv_object();
        sv *params = sv_array();
        int p;
        for (p = 0; p < fn->overs[o].n_params; p++) {
            sv *pd = sv_object();
            obj_set(pd, "name", sv_string(fn->overs[o].params[p].name));
            if (fn->overs[o].params[p].dflt)
                obj_set(pd, "default",
                        sv_ref(fn->overs[o].params[p].dflt));
            arr_push(params, pd);
        }
        obj_set(od, "params", params);
        arr_push(overs, od);
    }
    obj_set(d, "overloads", overs);
    return d;
}

static uint64_t e_describe(uint64_t h) {
    sv *v = from_handle(h);
    sv *d = NULL;
    if (v->kind == K_FUNCTION && !v->is_foreign) {
        d = describe_fn(v->u.f.fn);
    } else if (v->kind == K_CLASS) {
        d = sv_object();
        obj_set(d, "name", sv_string(v->u.c.cls->name));
        obj_set(d, "doc", sv_string(v->u.c.cls->doc));
        sv *methods = sv_array();
        int i;
        for (i = 0; i < v->u.c.cls->n_methods; i++)
            arr_push(methods, sv_string(v->u.c.cls->methods[i].name));
        obj_set(d, "methods", methods);
    } else if (v->kind == K_INSTANCE) {
        d = sv_object();
        obj_set(d, "class", sv_string(v->u.inst.cls->name));
    } else {
        d = sv_object();
    }
    uint64_t out = emit(d);
    sv_unref(d);
    return out;
}

static const SvarEntryTable g_table = {
    e_abi_version,
    e_module_root,
    e_value_kind,
    e_value_clone,
    e_value_release,
    e_value_int,
    e_value_real,
    e_value_string,
    e_value_buffer,
    e_array_size,
    e_array_get,
    e_object_keys,
    e_object_get,
    e_object_set,
    e_call,
    e_describe,
};

const SvarEntryTable *svar_module_entry_v1(const SvarEntryTable *host) {
    g_host = host;
    build_root();
    return &g_table;
}
